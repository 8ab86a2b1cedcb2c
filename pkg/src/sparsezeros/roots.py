"""Distinct zeros of sparse polynomials in F_{q^j}((T^{1/e})).

The search walks the Newton polygon: every segment with integral slope
gives a residual polynomial over the residue field, each simple residual
root is Hensel-lifted, and each multiple residual root is re-centred and
searched again one level deeper.  Coefficients stay EXACT Laurent
polynomials throughout, so an exactly-vanishing constant term after
re-centring proves an exact root.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import CapExceeded, PrecisionError
from .fields import roots_with_multiplicity
from .laurent import (
    INFINITE,
    LaurentSeries,
    SeriesField,
    _conv,
    _vadd,
    _vinv,
    _vneg,
    series_field,
    val,
)
from .limits import max_enum
from .newton import binom_mod_p, lower_hull
from .poly import SparsePoly, evaluate, pth_power_reduce, recenter

__all__ = ["RootRecord", "UpperBound", "roots_in", "roots_deg_le_d", "oracle_roots", "distinct_count"]

EXACT_CHECK_BUDGET = 60000


@dataclass(frozen=True)
class UpperBound:
    n: int

    def __str__(self):
        return f"<={self.n}"


@dataclass
class RootRecord:
    value: LaurentSeries
    multiplicity: int
    resolved: bool
    exact: bool = False
    certified_prec: int | None = None  # absolute, in S-units; None when exact
    home: tuple = (1, 1)
    degree_over_K: object = 1
    note: str = ""
    extras: dict = dc_field(default_factory=dict)

    @property
    def valuation(self):
        return val(self.value)

    def is_zero(self) -> bool:
        return self.exact and self.value.is_zero()

    def truncated(self, rel: int) -> LaurentSeries:
        """The root modulo S^{v + rel} (0 stays exact 0)."""
        if self.is_zero():
            return self.value
        v = self.value
        return v.truncate(v.order + rel)

    def to_json(self) -> dict:
        g = self.valuation
        return {
            "value": str(self.value),
            "valuation": "inf" if g is INFINITE else str(g),
            "j": self.home[0],
            "e": self.home[1],
            "multiplicity": self.multiplicity,
            "resolved": self.resolved,
            "exact": self.exact,
            "degree": self.degree_over_K if isinstance(self.degree_over_K, int) else str(self.degree_over_K),
            "certified_prec": None if self.certified_prec is None else str(Fraction(self.certified_prec, self.value.field.e)),
            "note": self.note,
        }


# -- truncated power-series helpers (vectors of codes, exponent = index) ------

def _eval_trunc(F, terms, u, P):
    """sum H_n u^n mod S^P for terms [(n, vector)]."""
    if not terms:
        return []
    top = max(n for n, _ in terms)
    if top <= 2 * len(terms) + 8:
        dense = dict(terms)
        acc: list = []
        for n in range(top, -1, -1):
            acc = _conv(F, acc, u, P) if acc else []
            c = dense.get(n)
            if c:
                acc = _vadd(F, acc, c[:P])
        return acc[:P]
    sq = [u]
    while (1 << len(sq)) <= top:
        sq.append(_conv(F, sq[-1], sq[-1], P))
    acc = []
    for n, c in terms:
        r = c[:P]
        b = 0
        while n >> b:
            if (n >> b) & 1:
                r = _conv(F, r, sq[b], P)
            b += 1
        acc = _vadd(F, acc, r)
    return acc[:P]


def _is_zero_vec(v) -> bool:
    return not any(v)


def _hensel(F, p, h, g, w, c, P):
    """Lift the simple residual root c of h at slope -g to precision P.

    Works with H(u) = S^{-w} h(S^g u), whose coefficients are integral, in
    F[[S]]/(S^P).  Returns the vector u with u[0] = c.
    """
    H = []
    for n, a in h.items():
        off = a.order + g * n - w
        if off < P:
            H.append((n, [0] * off + list(a.coeffs[: P - off])))
    dH = [(n - 1, [F.mul(F.from_int(n), x) for x in vec]) for n, vec in H if n % p]
    u = [c]
    k = 1
    while k < P:
        k = min(2 * k, P)
        u = (u + [0] * k)[:k]
        Hu = _eval_trunc(F, [(n, v[:k]) for n, v in H], u, k)
        dHu = _eval_trunc(F, [(n, v[:k]) for n, v in dH], u, k)
        delta = _conv(F, Hu, _vinv(F, dHu, k), k)
        u = _vadd(F, u, _vneg(F, delta))[:k]
    for _ in range(8):
        Hu = _eval_trunc(F, H, u, P)
        if _is_zero_vec(Hu):
            return u
        dHu = _eval_trunc(F, dH, u, P)
        u = _vadd(F, u, _vneg(F, _conv(F, Hu, _vinv(F, dHu, P), P)))[:P]
    raise PrecisionError("Hensel iteration failed to converge")  # pragma: no cover


def _taylor_shift(field: SeriesField, h: dict, c: int, g: int) -> dict:
    """h(c S^g + y) as a dict of exact coefficients."""
    F = field.residue
    p = field.p
    acc: dict[int, dict[int, int]] = {}
    cpow = [1]
    top = max(h)
    for _ in range(top):
        cpow.append(F.mul(cpow[-1], c))
    for i, a in h.items():
        items = list(a.items())
        for j in range(i + 1):
            b = binom_mod_p(i, j, p)
            if not b:
                continue
            s = F.mul(F.from_int(b), cpow[i - j])
            sh = g * (i - j)
            slot = acc.setdefault(j, {})
            for ex, code in items:
                key = ex + sh
                slot[key] = F.add(slot.get(key, 0), F.mul(s, code))
    out = {}
    for j, slot in acc.items():
        nz = {e: v for e, v in slot.items() if v}
        if nz:
            lo, hi = min(nz), max(nz)
            out[j] = LaurentSeries.make(field, lo, [nz.get(e, 0) for e in range(lo, hi + 1)])
    return out


# -- the search ---------------------------------------------------------------

class _Search:
    def __init__(self, f: SparsePoly, prec: int, depth: int, mult_factor: int):
        self.f = f
        self.field = f.field
        self.F = f.field.residue
        self.p = f.field.p
        self.prec = prec
        self.depth = depth
        self.mult = mult_factor
        self.records: list[RootRecord] = []

    def run(self):
        h = {n: a for n, a in self.f.terms}
        self.visit(h, None, self.field.zero(), self.depth)
        return self.records

    def visit(self, h: dict, floor, base: LaurentSeries, depth: int):
        n0 = min(h)
        if n0 > 0:
            self.records.append(RootRecord(base, n0 * self.mult, True, exact=True))
            h = {n - n0: a for n, a in h.items()}
        if len(h) < 2:
            return
        if any(a.looks_zero() for a in h.values()):
            self.records.append(
                RootRecord(base, 1, False, certified_prec=base.lower_order(), note="coefficient precision exhausted")
            )
            return
        pts = sorted((n, a.order) for n, a in h.items())
        hull = lower_hull(pts)
        for (n1, v1), (n2, v2) in zip(hull, hull[1:]):
            g = Fraction(v1 - v2, n2 - n1)
            if (floor is not None and g <= floor) or g.denominator != 1:
                continue
            g = int(g)
            w = v1 + g * n1
            residual = [0] * (n2 - n1 + 1)
            for n in range(n1, n2 + 1):
                a = h.get(n)
                if a is not None and a.order + g * n == w:
                    residual[n - n1] = a.coeffs[0]
            for c, m in roots_with_multiplicity(self.F, residual):
                if m == 1:
                    self.lift(h, g, w, c, base)
                elif depth <= 0 or max(h) > max_enum("recenter"):
                    approx = base + self.field.monomial(c, g).truncate(g + 1)
                    self.records.append(
                        RootRecord(approx, m * self.mult, False, certified_prec=g + 1, note="unresolved cluster")
                    )
                else:
                    h1 = _taylor_shift(self.field, h, c, g)
                    self.visit(h1, g, base + self.field.monomial(c, g), depth - 1)

    def lift(self, h, g, w, c, base):
        P = self.prec
        u = _hensel(self.F, self.p, h, g, w, c, P)
        root = base + LaurentSeries.make(self.field, g, u, g + P)
        exact = False
        cand = root.as_exact()
        if self.f.degree * max(1, len(cand.coeffs)) <= EXACT_CHECK_BUDGET and evaluate(self.f, cand).is_zero():
            root, exact = cand, True
        self.records.append(
            RootRecord(root, self.mult, True, exact=exact, certified_prec=None if exact else g + P)
        )


def _home(value: LaurentSeries) -> tuple[int, int]:
    """Smallest (j', e') field in the lattice containing the known digits of value."""
    fld = value.field
    F = fld.residue
    bm = fld.base.m
    codes = [c for c in value.coeffs if c]
    jj = fld.j
    for jp in range(1, fld.j + 1):
        if fld.j % jp == 0 and all(F.in_subfield(c, bm * jp) for c in codes):
            jj = jp
            break
    ee = fld.e
    exps = [i for i, _ in value.items()]
    for ep in range(1, fld.e + 1):
        if fld.e % ep == 0 and all(i % (fld.e // ep) == 0 for i in exps):
            ee = ep
            break
    return jj, ee


def _degree(home) -> object:
    j, e = home
    return j if e == 1 else UpperBound(j * e)


def roots_in(f: SparsePoly, target: SeriesField | None = None, prec: int = 16, depth: int | None = None,
             verify: bool = True) -> list[RootRecord]:
    """All distinct zeros of f in ``target`` (default: f's own field).

    Simple roots are certified to ``prec`` digits past their own Newton
    level; exact roots are flagged.  Multiple roots that survive ``depth``
    recentrings are reported as unresolved clusters.
    """
    target = target or f.field
    if prec < 1:
        raise ValueError("prec must be >= 1")
    if verify and not f.is_exact():
        raise PrecisionError("verification mode needs EXACT coefficients")
    g = f.lift(target)
    s = 0
    if g.is_exact():
        g, s = pth_power_reduce(g)
    recs = _Search(g, prec, prec if depth is None else depth, g.field.p ** s).run()
    for r in recs:
        r.home = _home(r.value)
        r.degree_over_K = _degree(r.home)
    recs.sort(key=lambda r: (r.value.lower_order(), str(r.value)))
    return recs


def distinct_count(records) -> int:
    return len(records)


def lattice(q_field, d: int):
    """(j, e) pairs with j*e <= d and e = 1 or prime to p."""
    p = q_field.p
    return [(j, e) for e in range(1, d + 1) for j in range(1, d // e + 1) if e == 1 or e % p]


def roots_deg_le_d(f: SparsePoly, d: int, prec: int = 16, depth: int | None = None) -> list[RootRecord]:
    """Zeros of degree <= d found in the tame lattice F_{q^j}((T^{1/e})), j*e <= d.

    Each root is kept only in the field that is its minimal home, which
    removes the copies found again in larger lattice fields.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    base = f.field.base
    out = []
    for j, e in lattice(base, d):
        fld = series_field(base, j, e)
        for r in roots_in(f, fld, prec, depth):
            if r.home == (j, e):
                out.append(r)
    out.sort(key=lambda r: (r.home, r.value.lower_order(), str(r.value)))
    return out


def _v(x: LaurentSeries):
    return x.lower_order()


class _Confirm:
    """Pruned deepening that decides whether a K-root lies in x + S^R O.

    The roots of f in that disk (over an algebraic closure) are counted
    from the Newton polygon of f(x + y): the largest index minimising
    v(b_i) + i R.  No root prunes the branch, exactly one is a K-rational
    root, and several are split by one more digit, at most ``depth`` times.
    """

    def __init__(self, f: SparsePoly, depth: int):
        red, _ = pth_power_reduce(f) if f.is_exact() else (f, 0)
        self.f = red
        self.depth = depth
        self.F = f.field.residue

    def count(self, x: LaurentSeries, R: int) -> int:
        b, _ = recenter(self.f, x)
        if b[0].is_zero():
            return -1
        vals = [c.lower_order() + i * R for i, c in enumerate(b)]
        low = min(vals)
        return max(i for i, v in enumerate(vals) if v == low)

    def accepts(self, x: LaurentSeries, R: int, spent: int = 0) -> bool:
        n = self.count(x, R)
        if n < 0 or n == 1:
            return True
        if n == 0 or spent >= self.depth:
            return False
        fld = x.field
        return any(self.accepts(x + fld.monomial(d, R), R + 1, spent + 1) for d in range(self.F.q))


def oracle_roots(f: SparsePoly, prec: int, window: tuple[int, int], field: SeriesField | None = None,
                 confirm_depth: int | None = None) -> set:
    """Brute force: every x = S^w (c_0 + ... + c_{prec-1} S^{prec-1}) with v(f(x)) >= theta.

    theta = min_i (v(a_i) + n_i w) + prec is a cluster criterion: it also
    admits points merely close to several zeros.  Unless ``confirm_depth``
    is 0, each passing x is kept only if the disk x + S^{w+prec} O is
    shown to hold a K-rational zero: an exact zero, or a disk holding a
    single zero, reached within ``confirm_depth`` further digits.  Returns the kept x (known modulo
    S^{w+prec}), plus exact 0 when n_0 > 0.
    """
    fld = field or f.field
    f = f.lift(fld)
    lo, hi = window
    F = fld.residue
    count = (F.q - 1) * F.q ** (prec - 1) * (hi - lo + 1)
    if count > max_enum("oracle"):
        raise CapExceeded(f"oracle enumeration of {count} candidates exceeds cap")
    extra = prec if confirm_depth is None else confirm_depth
    confirm = _Confirm(f, extra) if extra else None
    out = set()
    if f.terms[0][0] > 0:
        out.add(fld.zero())
    for w in range(lo, hi + 1):
        theta = min(a.order + n * w for n, a in f.terms) + prec
        for c0 in range(1, F.q):
            for rest in itertools.product(range(F.q), repeat=prec - 1):
                x = LaurentSeries.make(fld, w, (c0,) + rest, w + prec)
                y = evaluate(f, x)
                if y.lower_order() < theta:
                    continue
                if confirm is None or confirm.accepts(x.as_exact(), w + prec):
                    out.add(x)
    return out
