"""Zeros of sparse polynomials over F_q((T)): exact root counting and verification."""

__version__ = "0.1.0"
