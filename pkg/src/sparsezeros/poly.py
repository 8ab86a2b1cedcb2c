"""Sparse polynomials a_0 x^{n_0} + ... + a_k x^{n_k} over a SeriesField."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded, FieldError, PrecisionError
from .laurent import LaurentSeries, SeriesField, embed_series
from .limits import max_enum
from .newton import binom_mod_p


@dataclass(frozen=True)
class SparsePoly:
    field: SeriesField
    terms: tuple  # ((n_i, a_i), ...) with strictly increasing n_i

    @classmethod
    def make(cls, field: SeriesField, terms) -> "SparsePoly":
        """Normalize: merge equal exponents, drop exactly-zero coefficients."""
        merged: dict[int, LaurentSeries] = {}
        for n, a in terms:
            if n < 0:
                raise ValueError(f"negative exponent {n}")
            if a.field != field:
                raise FieldError(f"coefficient field {a.field} differs from {field}")
            merged[n] = merged[n] + a if n in merged else a
        kept = tuple((n, a) for n, a in sorted(merged.items()) if not a.is_zero())
        if not kept:
            raise ValueError("zero polynomial")
        for n, a in kept:
            if a.looks_zero():
                raise PrecisionError(f"coefficient of x^{n} is indistinguishable from 0")
        return cls(field, kept)

    @property
    def k(self) -> int:
        return len(self.terms) - 1

    @property
    def exponents(self) -> list[int]:
        return [n for n, _ in self.terms]

    @property
    def coeffs(self) -> list[LaurentSeries]:
        return [a for _, a in self.terms]

    @property
    def degree(self) -> int:
        return self.terms[-1][0]

    def is_exact(self) -> bool:
        return all(a.is_exact() for _, a in self.terms)

    def __str__(self):
        from .parser import format_poly

        return format_poly(self)

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "q": self.field.q,
            "p": self.field.p,
            "j": self.field.j,
            "e": self.field.e,
            "terms": [[n, a.to_json()] for n, a in self.terms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SparsePoly":
        from .fields import field_of_size
        from .laurent import series_field

        base = field_of_size(data["q"])
        field = series_field(base, data.get("j", 1), data.get("e", 1))
        return cls.make(field, [(n, LaurentSeries.from_json(a, base)) for n, a in data["terms"]])

    def __call__(self, x: LaurentSeries) -> LaurentSeries:
        return evaluate(self, x)

    def derivative(self) -> "SparsePoly | None":
        p = self.field.p
        terms = [(n - 1, a * (n % p)) for n, a in self.terms if n % p]
        return SparsePoly.make(self.field, terms) if terms else None

    def lift(self, target: SeriesField) -> "SparsePoly":
        if target == self.field:
            return self
        return SparsePoly(target, tuple((n, embed_series(a, target)) for n, a in self.terms))


def _powers(x: LaurentSeries, exps):
    """x^n for every n in exps, sharing the repeated squarings."""
    out = {}
    top = max(exps)
    sq = [x]
    while (1 << len(sq)) <= top:
        sq.append(sq[-1] * sq[-1])
    for n in exps:
        r = x.field.one()
        b = 0
        while n >> b:
            if (n >> b) & 1:
                r = r * sq[b]
            b += 1
        out[n] = r
    return out


def evaluate(f: SparsePoly, x: LaurentSeries) -> LaurentSeries:
    """Sum of a_i x^{n_i} with precision propagation.

    ``x`` may live in an extension of f's field; coefficients are embedded.
    """
    if x.field != f.field:
        f = f.lift(x.field)
    if x.is_zero():
        n0, a0 = f.terms[0]
        return a0 if n0 == 0 else f.field.zero()
    pw = _powers(x, [n for n, _ in f.terms])
    acc = f.field.zero()
    for n, a in f.terms:
        acc = acc + a * pw[n]
    if not acc.is_exact() and acc.looks_zero() and x.is_exact() and f.is_exact():
        raise PrecisionError("precision collapse during evaluation")  # pragma: no cover
    return acc


def recenter(f: SparsePoly, r: LaurentSeries) -> tuple[list[LaurentSeries], int]:
    """Coefficients b_0..b_{n_k} of f(r + x), and M.

    M is the least index whose coefficient attains the minimum valuation
    over all b_i (the first unit after rescaling to minimum valuation 0).
    """
    if f.degree > max_enum("recenter"):
        raise CapExceeded(f"degree {f.degree} exceeds the dense-expansion cap")
    if r.field != f.field:
        f = f.lift(r.field)
    p = f.field.p
    n = f.degree
    rp = [f.field.one()]
    for _ in range(n):
        rp.append(rp[-1] * r)
    b = []
    for j in range(n + 1):
        acc = f.field.zero()
        for ni, a in f.terms:
            if ni < j:
                continue
            c = binom_mod_p(ni, j, p)
            if c:
                acc = acc + (a * rp[ni - j]) * c
        b.append(acc)
    orders = [x.lower_order() for x in b]
    low = min(orders)
    if low == float("inf"):
        raise PrecisionError("recentered polynomial is identically zero")
    M = orders.index(low)
    return b, M


def transform_xe(f: SparsePoly, e: int) -> SparsePoly:
    """f(x^e)."""
    if e < 1:
        raise ValueError("e must be positive")
    return SparsePoly(f.field, tuple((n * e, a) for n, a in f.terms))


def transform_reverse(f: SparsePoly, m: int, strict: bool = True) -> SparsePoly:
    """x^m f(1/x), for m > deg f.

    ``strict=False`` also allows m = deg f, which is what undoing a reversal
    of a polynomial with a constant term needs.
    """
    if m < f.degree or (strict and m == f.degree):
        raise ValueError(f"m={m} must exceed deg f = {f.degree}")
    return SparsePoly(f.field, tuple(sorted(((m - n, a) for n, a in f.terms), key=lambda t: t[0])))


def _series_pth_root(a: LaurentSeries) -> LaurentSeries | None:
    p = a.field.p
    F = a.field.residue
    if any(i % p for i, _ in a.items()):
        return None
    items = dict(a.items())
    lead = a.lead // p
    top = a.end
    coeffs = [F.frob(items.get(i, 0), F.m - 1) for i in range(a.lead, top, p)]
    return LaurentSeries.make(a.field, lead, coeffs)


def pth_power_reduce(f: SparsePoly) -> tuple[SparsePoly, int]:
    """(g, s) with f = g^{p^s} and s maximal."""
    if not f.is_exact():
        raise PrecisionError("p-th power reduction needs EXACT coefficients")
    p = f.field.p
    s = 0
    while True:
        if any(n % p for n, _ in f.terms):
            break
        roots = [_series_pth_root(a) for _, a in f.terms]
        if any(r is None for r in roots):
            break
        f = SparsePoly(f.field, tuple((n // p, r) for (n, _), r in zip(f.terms, roots)))
        s += 1
    return f, s
