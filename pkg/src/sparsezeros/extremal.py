"""Subspace polynomials c * prod_{alpha in V} (x - alpha) and their sharpness checks."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .census import bound_table
from .errors import CapExceeded, CheckFailed, FieldError
from .fields import FieldSpec
from .laurent import LaurentSeries, SeriesField, embed_series, restrict_series, series_field
from .limits import max_enum
from .poly import SparsePoly, transform_xe
from .roots import oracle_roots, roots_deg_le_d, roots_in


@dataclass(frozen=True)
class SubspaceSpec:
    base: SeriesField  # K = F_q((T))
    label_field: FieldSpec  # F, an extension of F_q
    basis: tuple  # exact LaurentSeries over base or over F((T))
    c: LaurentSeries | None = None

    @property
    def ambient(self) -> SeriesField:
        return series_field(self.base.base, self.label_field.m // self.base.base.m)

    @property
    def k(self) -> int:
        return len(self.basis)


def _qpow(a: LaurentSeries, Q: int) -> LaurentSeries:
    """a^Q for Q a power of p: coefficientwise Frobenius and T -> T^Q."""
    F = a.field.residue
    i = 0
    qq = Q
    while qq > 1:
        qq //= F.p
        i += 1
    items = {n * Q: F.frob(c, i) for n, c in a.items()}
    if not items:
        return a
    lo, hi = min(items), max(items)
    return LaurentSeries.make(a.field, lo, [items.get(n, 0) for n in range(lo, hi + 1)])


def _eval_additive(coeffs: list[LaurentSeries], Q: int, x: LaurentSeries) -> LaurentSeries:
    acc = x.field.zero()
    xp = x
    for a in coeffs:
        acc = acc + a * xp
        xp = _qpow(xp, Q)
    return acc


def subspace_coefficients(spec: SubspaceSpec) -> list[LaurentSeries]:
    """a_0..a_k with prod_{alpha in V}(x - alpha) = sum a_i x^{|F|^i} (monic, before c)."""
    Q = spec.label_field.q
    if Q ** spec.k > max_enum("subspace"):
        raise CapExceeded(f"degree {Q}^{spec.k} exceeds the subspace-polynomial cap")
    amb = spec.ambient
    basis = [embed_series(b, amb) for b in spec.basis]
    coeffs = [amb.one()]  # f_empty = x
    for w in basis:
        fw = _eval_additive(coeffs, Q, w)
        if fw.is_zero():
            raise FieldError(f"basis is dependent over F_{Q}: {w} lies in the span of the others")
        scal = fw ** (Q - 1)
        # f_new(x) = f(x)^Q - f(w)^{Q-1} f(x)
        new = [amb.zero()] * (len(coeffs) + 1)
        for i, a in enumerate(coeffs):
            new[i + 1] = new[i + 1] + _qpow(a, Q)
            new[i] = new[i] - scal * a
        coeffs = new
    return coeffs


def subspace_poly(spec: SubspaceSpec, over: SeriesField | None = None) -> SparsePoly:
    """c * prod_{alpha in V}(x - alpha) as a sparse polynomial.

    ``over`` defaults to K when every coefficient lies in K (Galois-stable V),
    else the ambient F((T)).
    """
    Q = spec.label_field.q
    coeffs = subspace_coefficients(spec)
    if any(a.is_zero() for a in coeffs):
        raise CheckFailed("subspace polynomial has a vanishing coefficient")
    amb = spec.ambient
    c = embed_series(spec.c, amb) if spec.c is not None else amb.one()
    terms = [(Q ** i, c * a) for i, a in enumerate(coeffs)]
    f = SparsePoly.make(amb, terms)
    if [n for n, _ in f.terms] != [Q ** i for i in range(spec.k + 1)]:
        raise CheckFailed("support is not {1, |F|, ..., |F|^k}")
    target = over
    if target is None:
        try:
            target = spec.base
            return SparsePoly(target, tuple((n, restrict_series(a, target)) for n, a in f.terms))
        except FieldError:
            return f
    if target == amb:
        return f
    return SparsePoly(target, tuple((n, restrict_series(a, target)) for n, a in f.terms))


def span(spec: SubspaceSpec) -> list[LaurentSeries]:
    """Every element of V = F-span of the basis, in F((T))."""
    amb = spec.ambient
    basis = [embed_series(b, amb) for b in spec.basis]
    out = []
    for combo in itertools.product(range(spec.label_field.q), repeat=spec.k):
        acc = amb.zero()
        for c, b in zip(combo, basis):
            acc = acc + b.scale(c)
        out.append(acc)
    return out


def verify_sharpness_thm1(spec: SubspaceSpec, prec: int = 16) -> dict:
    """Roots of the F_q-subspace polynomial in K: exactly q^k, exact, equal to V."""
    if spec.label_field != spec.base.base:
        raise FieldError("q^k sharpness needs the label field F = F_q")
    f = subspace_poly(spec)
    recs = roots_in(f, spec.base, prec)
    V = set(span(spec))
    found = {r.value for r in recs}
    q, k = spec.base.q, spec.k
    ok = len(recs) == q ** k and all(r.exact for r in recs) and found == V
    return {
        "schema": "v1",
        "check": "sharpness_thm1",
        "poly": str(f),
        "q": q,
        "k": k,
        "count": len(recs),
        "bound": q ** k,
        "all_exact": all(r.exact for r in recs),
        "equals_subspace": found == V,
        "passed": ok,
    }


def verify_sharpness_thm2(spec: SubspaceSpec, d: int, prec: int = 16) -> dict:
    """Per-degree root counts of a Galois-stable subspace polynomial vs the bound table."""
    q = spec.base.q
    for i in range(1, d + 1):
        if spec.label_field.m % (spec.base.base.m * i):
            raise FieldError(f"label field must contain F_(q^{i}) for every i <= d")
    f = subspace_poly(spec)
    if f.field != spec.base:
        raise FieldError("basis must lie in K for a Galois-stable subspace")
    recs = roots_deg_le_d(f, d, prec)
    by_deg = Counter(r.degree_over_K for r in recs if isinstance(r.degree_over_K, int))
    table = bound_table(q, spec.k, d)
    per = [by_deg.get(j, 0) for j in range(1, d + 1)]
    ok = per == table.per_degree and len(recs) == table.total
    return {
        "schema": "v1",
        "check": "sharpness_thm2",
        "poly": str(f),
        "q": q,
        "k": spec.k,
        "d": d,
        "per_degree": per,
        "expected_per_degree": table.per_degree,
        "count": len(recs),
        "bound": table.total,
        "passed": ok,
    }


def verify_xe_variant(spec: SubspaceSpec, e: int, prec: int = 16, oracle: bool = False) -> dict:
    """Count the zeros in K of f(x^e) for a subspace polynomial f."""
    orders = [b.order for b in spec.basis]
    applicable = len(set(orders)) == len(orders) and all(o % e == 0 for o in orders)
    f = subspace_poly(spec)
    fe = transform_xe(f, e)
    recs = roots_in(fe, spec.base, prec)
    q, k = spec.base.q, spec.k
    report = {
        "schema": "v1",
        "check": "xe_variant",
        "poly": str(fe),
        "e": e,
        "status": "APPLICABLE" if applicable else "NOT_APPLICABLE",
        "count": len(recs),
        "bound": q ** k,
        "passed": len(recs) == q ** k if applicable else True,
    }
    if oracle:
        lo = min(r.value.order for r in recs if not r.is_zero()) if len(recs) > 1 else 0
        hi = max(r.value.order for r in recs if not r.is_zero()) if len(recs) > 1 else 0
        orc = oracle_roots(fe, 4, (lo, hi))
        mine = {r.truncated(4) for r in recs}
        report["oracle_agrees"] = orc == mine
        report["passed"] = report["passed"] and orc == mine
    return report
