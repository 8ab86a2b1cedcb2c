"""Exception hierarchy; the CLI maps these onto exit codes."""


class SparseZerosError(Exception):
    """Base class for library errors."""


class FieldError(SparseZerosError, ValueError):
    pass


class PrecisionError(SparseZerosError, ArithmeticError):
    """A result needs more precision than the inputs carry."""


class CapExceeded(SparseZerosError):
    """An enumeration or expansion cap would be exceeded."""


class ParseError(SparseZerosError, ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class CheckFailed(SparseZerosError, AssertionError):
    """A verified inequality or identity did not hold."""
