"""Text grammar for Laurent coefficients and sparse polynomials.

    poly    := term (('+'|'-') term)*
    term    := coeff ('*' xpow)? | xpow
    xpow    := 'x' ('^' uint)?
    coeff   := latom | '(' laurent ')'
    laurent := latom (('+'|'-') latom)*
    latom   := felem ('*' felem)* ('*' tpow)? | tpow
    tpow    := 'T' ('^' int)?
    felem   := uint | 'g' ('^' uint)?

Integer literals reduce mod p and ``g`` is the class of x modulo the
residue field's canonical modulus.  A leading sign is allowed on the
first term of a sum.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .laurent import LaurentSeries, SeriesField, format_terms
from .poly import SparsePoly

_TOKEN = re.compile(r"\s*(?:(\d+)|([xTg])|(\^)|(\*)|(\+)|(-)|(\()|(\)))")
_KINDS = ["int", "name", "^", "*", "+", "-", "(", ")"]
MAX_EXPONENT = 2 ** 63 - 1


def _tokenize(src: str):
    toks = []
    pos = 0
    line, line_start = 1, 0
    while True:
        while pos < len(src) and src[pos].isspace():
            if src[pos] == "\n":
                line += 1
                line_start = pos + 1
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        start = m.start(m.lastindex)
        kind = _KINDS[m.lastindex - 1]
        text = m.group(m.lastindex)
        toks.append((kind, text, line, start - line_start + 1))
        pos = m.end()
    toks.append(("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, src: str, field: SeriesField):
        self.toks = _tokenize(src)
        self.i = 0
        self.field = field
        self.F = field.residue

    def peek(self, off=0):
        return self.toks[self.i + off]

    def at(self, kind, text=None):
        k, t, *_ = self.peek()
        return k == kind and (text is None or t == text)

    def take(self, kind, text=None):
        tok = self.peek()
        if not self.at(kind, text):
            want = text or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def error(self, msg):
        tok = self.peek()
        raise ParseError(msg, tok[2], tok[3])

    def uint(self):
        tok = self.take("int")
        n = int(tok[1])
        if n > MAX_EXPONENT:
            raise ParseError("exponent overflow", tok[2], tok[3])
        return n

    def signed_int(self):
        neg = False
        if self.at("-"):
            self.take("-")
            neg = True
        n = self.uint()
        return -n if neg else n

    # laurent level: returns dict {T-exponent: code}
    def felem(self) -> int:
        if self.at("int"):
            return self.F.from_int(int(self.take("int")[1]))
        if self.at("name", "g"):
            self.take("name", "g")
            n = 1
            if self.at("^"):
                self.take("^")
                n = self.uint()
            return self.F.pow(self.F.gen(), n)
        self.error("expected a field element (integer or g)")

    def tpow(self) -> int:
        self.take("name", "T")
        if self.at("^"):
            self.take("^")
            return self.signed_int()
        return 1

    def latom(self) -> tuple[int, int]:
        if self.at("name", "T"):
            return self.tpow(), 1
        c = self.felem()
        while self.at("*") and self.peek(1)[1] != "x":
            self.take("*")
            if self.at("name", "T"):
                return self.tpow(), c
            c = self.F.mul(c, self.felem())
        return 0, c

    def laurent(self) -> dict:
        acc: dict[int, int] = {}
        sign = 1
        if self.at("-"):
            self.take("-")
            sign = -1
        while True:
            exp, c = self.latom()
            if sign < 0:
                c = self.F.neg(c)
            acc[exp] = self.F.add(acc.get(exp, 0), c)
            if self.at("+") or self.at("-"):
                sign = 1 if self.take(self.peek()[0])[0] == "+" else -1
                continue
            return acc

    def xpow(self) -> int:
        self.take("name", "x")
        if self.at("^"):
            self.take("^")
            return self.uint()
        return 1

    def term(self) -> tuple[int, dict]:
        if self.at("name", "x"):
            return self.xpow(), {0: 1}
        if self.at("("):
            self.take("(")
            coeff = self.laurent()
            self.take(")")
        else:
            exp, c = self.latom()
            coeff = {exp: c}
        if self.at("*"):
            self.take("*")
            return self.xpow(), coeff
        return 0, coeff

    def poly(self) -> dict:
        terms: dict[int, dict] = {}
        sign = 1
        if self.at("-"):
            self.take("-")
            sign = -1
        while True:
            n, coeff = self.term()
            slot = terms.setdefault(n, {})
            for e, c in coeff.items():
                if sign < 0:
                    c = self.F.neg(c)
                slot[e] = self.F.add(slot.get(e, 0), c)
            if self.at("+") or self.at("-"):
                sign = 1 if self.take(self.peek()[0])[0] == "+" else -1
                continue
            break
        self.take("eof")
        return terms


def _series_from_dict(field: SeriesField, d: dict) -> LaurentSeries:
    items = {e * field.e: c for e, c in d.items() if c}
    if not items:
        return field.zero()
    lo, hi = min(items), max(items)
    return LaurentSeries.make(field, lo, [items.get(i, 0) for i in range(lo, hi + 1)])


def parse_poly(src: str, field: SeriesField) -> SparsePoly:
    """Parse a sparse polynomial in x with Laurent-polynomial coefficients in T."""
    terms = _Parser(src, field).poly()
    out = [(n, _series_from_dict(field, d)) for n, d in terms.items()]
    out = [(n, a) for n, a in out if not a.is_zero()]
    if not out:
        raise ParseError("zero polynomial", 1, 1)
    return SparsePoly.make(field, out)


def parse_series(src: str, field: SeriesField) -> LaurentSeries:
    """Parse a Laurent polynomial in T, e.g. ``1 + g*T^-1 + T^2``."""
    p = _Parser(src, field)
    if p.at("("):
        p.take("(")
        d = p.laurent()
        p.take(")")
    else:
        d = p.laurent()
    p.take("eof")
    return _series_from_dict(field, d)


def format_coeff(a: LaurentSeries) -> str:
    terms = format_terms(a.field, a.items())
    if len(terms) == 1:
        return terms[0]
    return "(" + " + ".join(terms) + ")"


def format_poly(f: SparsePoly) -> str:
    parts = []
    for n, a in reversed(f.terms):
        xp = "" if n == 0 else ("x" if n == 1 else f"x^{n}")
        c = format_coeff(a)
        if not xp:
            parts.append(c)
        elif c == "1":
            parts.append(xp)
        else:
            parts.append(f"{c}*{xp}")
    return " + ".join(parts)
