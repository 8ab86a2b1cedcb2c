"""Newton polygons, dependence indices N_j and the proper order of segments."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import PrecisionError


def binom_mod_p(n: int, t: int, p: int) -> int:
    """C(n, t) mod p by Lucas' theorem."""
    if t < 0 or t > n:
        return 0
    out = 1
    while n or t:
        a, b = n % p, t % p
        if b > a:
            return 0
        num = den = 1
        for i in range(b):
            num = num * (a - i) % p
            den = den * (i + 1) % p
        out = out * num * pow(den, p - 2, p) % p
        n //= p
        t //= p
    return out


def dependence_index(exponents, p: int) -> int:
    """Largest N such that the (1+x)^e, e in exponents, are F_p-dependent mod x^N.

    Columns t = 0, 1, ... of the matrix C(e_i, t) mod p are added one at a
    time and reduced against an echelon basis of the columns seen so far;
    N is one less than the number of columns at which the rank becomes r.
    """
    exps = list(exponents)
    if len(set(exps)) != len(exps):
        raise ValueError(f"duplicate exponents in {exps}")
    r = len(exps)
    if r == 0:
        raise ValueError("need at least one exponent")
    basis: list[tuple[int, list[int]]] = []  # (pivot row, column vector with pivot 1)
    t = 0
    while True:
        col = [binom_mod_p(e, t, p) for e in exps]
        for piv, vec in basis:
            c = col[piv]
            if c:
                col = [(x - c * y) % p for x, y in zip(col, vec)]
        piv = next((i for i, x in enumerate(col) if x), None)
        if piv is not None:
            inv = pow(col[piv], p - 2, p)
            basis.append((piv, [x * inv % p for x in col]))
            if len(basis) == r:
                return t
        t += 1


def lower_hull(points):
    """Lower convex hull (monotone chain) of points sorted by x, distinct x."""
    hull: list = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] unless it lies strictly below the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


@dataclass(frozen=True)
class Segment:
    lo: tuple  # (n_lo, v_lo)
    hi: tuple  # (n_hi, v_hi)
    exponents: tuple
    N: int = 0
    order_pos: int = 0

    @property
    def slope(self) -> Fraction:
        return Fraction(self.hi[1] - self.lo[1]) / (self.hi[0] - self.lo[0])

    @property
    def g(self) -> Fraction:
        """Valuation of the roots belonging to this segment."""
        return -self.slope

    @property
    def h_len(self) -> int:
        return self.hi[0] - self.lo[0]

    def to_json(self) -> dict:
        return {
            "lo": [self.lo[0], _frac(self.lo[1])],
            "hi": [self.hi[0], _frac(self.hi[1])],
            "slope": _frac(self.slope),
            "g": _frac(self.g),
            "exponents": list(self.exponents),
            "h_len": self.h_len,
            "N": self.N,
            "order_pos": self.order_pos,
        }


def _frac(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class NewtonPolygon:
    segments: tuple
    zero_root_mult: int

    def segment_for(self, g) -> Segment | None:
        for s in self.segments:
            if s.g == g:
                return s
        return None

    def to_json(self) -> dict:
        verts = []
        if self.segments:
            hull = sorted({s.lo for s in self.segments} | {s.hi for s in self.segments})
            verts = [[n, _frac(v)] for n, v in hull]
        return {
            "schema": "v1",
            "vertices": verts,
            "segments": [s.to_json() for s in self.segments],
            "zero_root_mult": self.zero_root_mult,
            "proper_order": [s.order_pos for s in self.segments],
        }


def segments_of(points, p: int) -> list[Segment]:
    """Hull-ordered segments of a point set [(n, v)], with N computed."""
    hull = lower_hull(sorted(points))
    segs = []
    for (n1, v1), (n2, v2) in zip(hull, hull[1:]):
        on = tuple(
            n for n, v in points if n1 <= n <= n2 and (v - v1) * (n2 - n1) == (v2 - v1) * (n - n1)
        )
        segs.append(Segment((n1, v1), (n2, v2), tuple(sorted(on)), dependence_index(sorted(on), p)))
    return segs


def polygon(f) -> NewtonPolygon:
    """Newton polygon of a SparsePoly in hull order, not yet properly ordered."""
    pts = []
    for n, a in f.terms:
        if a.looks_zero():
            raise PrecisionError(f"valuation of the x^{n} coefficient is unknown")
        pts.append((n, Fraction(a.order, f.field.e)))
    segs = segments_of(pts, f.field.p)
    return NewtonPolygon(tuple(segs), f.terms[0][0])


def proper_order(poly: NewtonPolygon, p: int | None = None) -> NewtonPolygon:
    """Stable sort by N descending; assigns order_pos = 1..t."""
    segs = sorted(poly.segments, key=lambda s: -s.N)
    segs = [replace(s, order_pos=i + 1) for i, s in enumerate(segs)]
    return NewtonPolygon(tuple(segs), poly.zero_root_mult)


def proper_polygon(f) -> NewtonPolygon:
    return proper_order(polygon(f), f.field.p)
