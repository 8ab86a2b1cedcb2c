"""Laurent series over finite fields: K = F_q((T)) and F_{q^j}((T^{1/e})).

A series lives in a :class:`SeriesField` with uniformizer ``S`` (``S^e = T``)
and residue field F_{q^j}.  Values are either EXACT Laurent polynomials
(``prec is None``) or known modulo ``S^prec``.  Valuations are reported in
units of v(T) = 1, so v(S) = 1/e.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import limits
from .errors import FieldError, PrecisionError
from .fields import FieldSpec, FqElem, embedding_table, fq_make, restriction_table

__all__ = [
    "SeriesField",
    "series_field",
    "LaurentSeries",
    "Above",
    "INFINITE",
    "val",
    "rescale",
    "coefficient_at",
    "embed_series",
    "restrict_series",
]


@dataclass(frozen=True)
class SeriesField:
    base: FieldSpec  # F_q, residue field of K
    residue: FieldSpec  # F_{q^j}
    e: int = 1

    def __post_init__(self):
        if self.e < 1:
            raise FieldError("ramification index must be >= 1")
        if self.residue.p != self.base.p or self.residue.m % self.base.m:
            raise FieldError(f"{self.residue} is not an extension of {self.base}")

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def j(self) -> int:
        return self.residue.m // self.base.m

    @property
    def label(self) -> tuple[int, int]:
        return (self.j, self.e)

    def __repr__(self):
        return f"SeriesField(q={self.q}, j={self.j}, e={self.e})"

    def zero(self) -> "LaurentSeries":
        return LaurentSeries(self, 0, ())

    def one(self) -> "LaurentSeries":
        return LaurentSeries(self, 0, (1,))

    def const(self, code: int) -> "LaurentSeries":
        return LaurentSeries.make(self, 0, [code])

    def monomial(self, code: int, exp: int) -> "LaurentSeries":
        """code * S^exp (exact)."""
        return LaurentSeries.make(self, exp, [code])

    def T(self) -> "LaurentSeries":
        return self.monomial(1, self.e)


@lru_cache(maxsize=None)
def series_field(base: FieldSpec, j: int = 1, e: int = 1) -> SeriesField:
    return SeriesField(base, fq_make(base.p, base.m * j), e)


class _Infinite:
    def __repr__(self):
        return "INFINITE"

    def __reduce__(self):
        return "INFINITE"


INFINITE = _Infinite()


@dataclass(frozen=True)
class Above:
    """Valuation of a series indistinguishable from 0: at least ``bound``."""

    bound: Fraction


# -- coefficient-vector kernels (codes, lowest exponent first) ----------------

def _vadd(F: FieldSpec, a, b):
    if len(a) < len(b):
        a, b = b, a
    if F.p == 2:
        head = [x ^ y for x, y in zip(a, b)]
    elif F.m == 1:
        p = F.p
        head = [(x + y) % p for x, y in zip(a, b)]
    else:
        add = F.add
        head = [add(x, y) for x, y in zip(a, b)]
    return head + list(a[len(b):])


def _vscale(F: FieldSpec, c: int, a):
    if c == 1:
        return list(a)
    if c == 0:
        return [0] * len(a)
    mul = F.mul
    return [mul(c, x) for x in a]


def _vneg(F: FieldSpec, a):
    if F.p == 2:
        return list(a)
    neg = F.neg_table
    return [neg[x] for x in a]


def _conv(F: FieldSpec, a, b, n: int):
    """First ``n`` coefficients of the product of two coefficient vectors.

    Kronecker substitution: both operands are packed into big integers with
    one slot per (S-exponent, g-exponent) pair, multiplied once, unpacked
    and reduced mod p and mod the field modulus.
    """
    if n <= 0 or not a or not b:
        return []
    a = a[:n]
    b = b[:n]
    if len(a) == 1:
        return _vscale(F, a[0], b)
    if len(b) == 1:
        return _vscale(F, b[0], a)
    p, m = F.p, F.m
    bound = min(len(a), len(b)) * m * (p - 1) ** 2
    if bound < 1 << 8:
        dt = np.uint8
    elif bound < 1 << 16:
        dt = np.uint16
    elif bound < 1 << 32:
        dt = np.uint32
    else:
        dt = np.uint64
    w = np.dtype(dt).itemsize
    if m == 1:
        pa = np.asarray(a, dtype=dt).tobytes()
        pb = np.asarray(b, dtype=dt).tobytes()
        slots = 1
    else:
        slots = 2 * m - 1
        da = np.zeros((len(a), slots), dtype=dt)
        da[:, :m] = F.digits[np.asarray(a)]
        db = np.zeros((len(b), slots), dtype=dt)
        db[:, :m] = F.digits[np.asarray(b)]
        pa, pb = da.tobytes(), db.tobytes()
    prod = int.from_bytes(pa, "little") * int.from_bytes(pb, "little")
    nout = min(n, len(a) + len(b) - 1)
    raw = prod.to_bytes((len(a) + len(b) - 1) * slots * w, "little")
    arr = np.frombuffer(raw, dtype=dt)[: nout * slots].astype(np.int64)
    if m == 1:
        return (arr % p).tolist()
    arr = arr.reshape(nout, slots) % p
    return (((arr @ F.red) % p) @ F.pw).tolist()


def _vinv(F: FieldSpec, a, n: int):
    """Inverse of a unit coefficient vector modulo S^n (Newton iteration)."""
    if not a or a[0] == 0:
        raise PrecisionError("inverse of a non-unit")
    y = [F.inv(a[0])]
    k = 1
    while k < n:
        k = min(2 * k, n)
        ay = _conv(F, a, y, k)
        # 2 - a*y, then y*(2 - a*y)
        t = _vneg(F, ay)
        t[0] = F.add(t[0], F.from_int(2))
        y = _conv(F, y, t, k)
    return y[:n]


def _strip(coeffs):
    i = 0
    while i < len(coeffs) and coeffs[i] == 0:
        i += 1
    j = len(coeffs)
    return i, j


# -- the series type ----------------------------------------------------------

@dataclass(frozen=True)
class LaurentSeries:
    field: SeriesField
    lead: int  # S-exponent of coeffs[0]
    coeffs: tuple
    prec: int | None = None  # None == EXACT

    @classmethod
    def make(cls, field: SeriesField, lead: int, coeffs, prec: int | None = None) -> "LaurentSeries":
        coeffs = list(coeffs)
        if prec is not None:
            coeffs = coeffs[: max(0, prec - lead)]
        i, j = _strip(coeffs)
        if i == len(coeffs):
            return cls(field, prec if prec is not None else 0, (), prec)
        while coeffs[j - 1] == 0:
            j -= 1
        return cls(field, lead + i, tuple(coeffs[i:j]), prec)

    # -- predicates
    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """Exactly zero (finite-precision zeros are *not* zero)."""
        return not self.coeffs and self.prec is None

    def looks_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self) -> int:
        """S-adic order of a nonzero series."""
        if not self.coeffs:
            raise PrecisionError("order of a series indistinguishable from 0")
        return self.lead

    def val(self):
        return val(self)

    def lower_order(self) -> float | int:
        """Order if known, else the precision bound (inf for exact zero)."""
        if self.coeffs:
            return self.lead
        return float("inf") if self.prec is None else self.prec

    @property
    def end(self) -> int:
        return self.lead + len(self.coeffs)

    def coefficient(self, i: int) -> int:
        """Code of the S^i coefficient."""
        if self.prec is not None and i >= self.prec:
            raise PrecisionError(f"coefficient of S^{i} unknown beyond precision {self.prec}")
        k = i - self.lead
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def dense(self, start: int, stop: int) -> list[int]:
        return [self.coefficient(i) for i in range(start, stop)]

    def items(self):
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.lead + i, c

    # -- arithmetic
    def _check(self, other):
        if not isinstance(other, LaurentSeries):
            raise TypeError(f"cannot combine LaurentSeries with {type(other).__name__}")
        if other.field != self.field:
            raise FieldError(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        F = self.field.residue
        prec = _min_prec(self.prec, other.prec)
        if not other.coeffs:
            return LaurentSeries.make(self.field, self.lead, self.coeffs, prec)
        if not self.coeffs:
            return LaurentSeries.make(self.field, other.lead, other.coeffs, prec)
        lo = min(self.lead, other.lead)
        a = [0] * (self.lead - lo) + list(self.coeffs)
        b = [0] * (other.lead - lo) + list(other.coeffs)
        return LaurentSeries.make(self.field, lo, _vadd(F, a, b), prec)

    def __neg__(self):
        return LaurentSeries(self.field, self.lead, tuple(_vneg(self.field.residue, self.coeffs)), self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(self.field.residue.from_int(other))
        self._check(other)
        va, vb = self.lower_order(), other.lower_order()
        cands = []
        if self.prec is not None:
            cands.append(self.prec + vb)
        if other.prec is not None:
            cands.append(other.prec + va)
        prec = None
        if cands:
            prec = min(cands)
            if prec == float("inf"):  # finite-precision times exact zero
                return self.field.zero()
            prec = int(prec)
        if not self.coeffs or not other.coeffs:
            return LaurentSeries.make(self.field, 0, (), prec)
        lead = self.lead + other.lead
        n = len(self.coeffs) + len(other.coeffs) - 1 if prec is None else prec - lead
        return LaurentSeries.make(
            self.field, lead, _conv(self.field.residue, list(self.coeffs), list(other.coeffs), n), prec
        )

    __rmul__ = __mul__

    def scale(self, code: int) -> "LaurentSeries":
        return LaurentSeries.make(self.field, self.lead, _vscale(self.field.residue, code, self.coeffs), self.prec)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by S^k."""
        return LaurentSeries(self.field, self.lead + k, self.coeffs, None if self.prec is None else self.prec + k)

    def inverse(self, window: int | None = None) -> "LaurentSeries":
        if not self.coeffs:
            raise PrecisionError("inversion of a series indistinguishable from 0")
        F = self.field.residue
        if self.prec is None:
            if len(self.coeffs) == 1:
                return LaurentSeries(self.field, -self.lead, (F.inv(self.coeffs[0]),), None)
            rel = window or limits.WINDOW
        else:
            rel = self.prec - self.lead
        inv = _vinv(F, list(self.coeffs), rel)
        return LaurentSeries.make(self.field, -self.lead, inv, -self.lead + rel)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, n: int) -> "LaurentSeries":
        """Reduce modulo S^n (result has finite precision n)."""
        if self.prec is not None and self.prec < n:
            raise PrecisionError(f"cannot truncate at {n}: known only to {self.prec}")
        return LaurentSeries.make(self.field, self.lead, self.coeffs, n)

    def as_exact(self) -> "LaurentSeries":
        """Forget the precision: the listed Laurent polynomial, exactly."""
        return LaurentSeries.make(self.field, self.lead, self.coeffs, None)

    def frob(self, i: int = 1) -> "LaurentSeries":
        """Apply c -> c^(p^i) to every coefficient."""
        F = self.field.residue
        return LaurentSeries(self.field, self.lead, tuple(F.frob(c, i) for c in self.coeffs), self.prec)

    def galois(self, i: int = 1) -> "LaurentSeries":
        """The i-th power of the K-automorphism c -> c^q acting coefficientwise."""
        return self.frob(i * self.field.base.m)

    def congruent(self, other: "LaurentSeries", n: int) -> bool:
        """Whether self and other agree modulo S^n."""
        d = self - other
        return not d.coeffs or d.lead >= n

    # -- text
    def __str__(self):
        return format_series(self)

    def to_json(self) -> dict:
        return {
            "j": self.field.j,
            "e": self.field.e,
            "lead": self.lead,
            "coeffs": [self.field.residue.vector(c) for c in self.coeffs],
            "prec": self.prec,
        }

    @classmethod
    def from_json(cls, data: dict, base: FieldSpec) -> "LaurentSeries":
        field = series_field(base, data.get("j", 1), data.get("e", 1))
        F = field.residue
        coeffs = [F.from_vector(c) if isinstance(c, list) else F.from_int(c) for c in data["coeffs"]]
        return cls.make(field, data["lead"], coeffs, data.get("prec"))


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _fmt_exp(i: int, e: int) -> str:
    if e == 1:
        return "" if i == 0 else ("T" if i == 1 else f"T^{i}")
    fr = Fraction(i, e)
    if fr == 0:
        return ""
    if fr.denominator == 1:
        return "T" if fr == 1 else f"T^{fr.numerator}"
    return f"T^({fr.numerator}/{fr.denominator})"


def format_terms(field: SeriesField, items) -> list[str]:
    """Grammar-compatible terms ``d*g^t*T^i`` for (exponent, code) pairs."""
    F = field.residue
    out = []
    for i, c in items:
        tp = _fmt_exp(i, field.e)
        for t, d in enumerate(F.vector(c)):
            if not d:
                continue
            parts = []
            if d != 1:
                parts.append(str(d))
            if t:
                parts.append("g" if t == 1 else f"g^{t}")
            if tp:
                parts.append(tp)
            out.append("*".join(parts) if parts else "1")
    return out


def format_series(x: LaurentSeries) -> str:
    terms = format_terms(x.field, x.items())
    body = " + ".join(terms) if terms else "0"
    if x.prec is not None:
        body += f" + O({_fmt_exp(x.prec, x.field.e) or '1'})"
    return body


# -- module-level operations --------------------------------------------------

def val(x: LaurentSeries):
    """v(x) in units of v(T); INFINITE for exact zero, Above(bound) for apparent zero."""
    if x.coeffs:
        return Fraction(x.lead, x.field.e)
    if x.prec is None:
        return INFINITE
    return Above(Fraction(x.prec, x.field.e))


def rescale(x: LaurentSeries, e_new: int) -> LaurentSeries:
    """Re-express x in a uniformizer S' with S'^e_new = S."""
    if e_new < 1:
        raise FieldError("rescale factor must be >= 1")
    f = x.field
    field = SeriesField(f.base, f.residue, f.e * e_new)
    if e_new == 1:
        return x
    coeffs = []
    for i, c in enumerate(x.coeffs):
        if i:
            coeffs.extend([0] * (e_new - 1))
        coeffs.append(c)
    prec = None if x.prec is None else x.prec * e_new
    return LaurentSeries.make(field, x.lead * e_new, coeffs, prec)


def embed_series(x: LaurentSeries, target: SeriesField) -> LaurentSeries:
    """Image of x in a field with bigger residue field and/or ramification."""
    f = x.field
    if target == f:
        return x
    if target.base != f.base or target.e % f.e or target.residue.m % f.residue.m:
        raise FieldError(f"{f} does not embed in {target}")
    tab = embedding_table(f.residue.p, f.residue.m, target.residue.m)
    moved = LaurentSeries(
        SeriesField(f.base, target.residue, f.e), x.lead, tuple(tab[c] for c in x.coeffs), x.prec
    )
    return rescale(moved, target.e // f.e)


def restrict_series(x: LaurentSeries, target: SeriesField) -> LaurentSeries:
    """Inverse of :func:`embed_series` for a series that lies in ``target``."""
    f = x.field
    if target == f:
        return x
    ratio = f.e // target.e
    if f.e % target.e or any(i % ratio for i, _ in x.items()):
        raise FieldError("series does not lie in the requested subfield (ramification)")
    inv = restriction_table(f.residue.p, target.residue.m, f.residue.m)
    try:
        coeffs = [inv[c] for c in x.coeffs]
    except KeyError:
        raise FieldError("series does not lie in the requested subfield (residue)") from None
    lead = x.lead // ratio if x.coeffs else 0
    picked = coeffs[::ratio]
    prec = None if x.prec is None else -(-x.prec // ratio)
    return LaurentSeries.make(target, lead, picked, prec)


def coefficient_at(x: LaurentSeries, g) -> FqElem:
    """Coefficient of S^{g e} (g in units of v(T))."""
    se = Fraction(g) * x.field.e
    if se.denominator != 1:
        raise PrecisionError(f"exponent {g} is not in the value group (1/{x.field.e})Z")
    return FqElem(x.field.residue, x.coefficient(int(se)))
