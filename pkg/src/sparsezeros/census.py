"""Bound formulas, random corpora and the verification campaign."""

from __future__ import annotations

import csv
import itertools
import json
import math
import random
import time
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

from .errors import CapExceeded, CheckFailed, PrecisionError
from .fields import field_of_size, fq_make
from .laurent import LaurentSeries, SeriesField, series_field
from .limits import max_enum
from .newton import NewtonPolygon, proper_polygon
from .parser import parse_poly
from .poly import SparsePoly, pth_power_reduce, recenter, transform_reverse
from .roots import RootRecord, oracle_roots, roots_in
from .trees import build_tree, phi_map, tree_length

E1 = "x^4 + (1+T+T^2)*x^2 + (T+T^2)*x"


# -- Moebius and the degree bound -------------------------------------------------

def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined for n >= 1")
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    return -out if n > 1 else out


def divisors(n: int) -> list[int]:
    return [i for i in range(1, n + 1) if n % i == 0]


@dataclass(frozen=True)
class BoundTable:
    q: int
    k: int
    d: int
    per_degree: list  # c_1..c_d, zeros of exact degree j
    total: int
    enumerated: int | None = None  # direct count, when within the cap

    def to_json(self) -> dict:
        return {"schema": "v1", **asdict(self)}


def exact_degree_count(q: int, k: int, j: int) -> int:
    return sum(q ** (i * k) * mobius(j // i) for i in divisors(j))


def enumerate_bound(q: int, k: int, d: int) -> int:
    """Polynomials in F_{q^L}[X]_{<k}, L = lcm(1..d), defined over some F_{q^j}, j <= d."""
    base = field_of_size(q)
    L = math.lcm(*range(1, d + 1))
    F = fq_make(base.p, base.m * L)
    # degree over F_q of each element
    deg = [_deg_over(F, a, base.m) for a in F.elements()]
    hits = 0
    for coeffs in itertools.product(range(F.q), repeat=k):
        j = 1
        for c in coeffs:
            j = math.lcm(j, deg[c])
        if j <= d:
            hits += 1
    return hits


def _deg_over(F, a: int, bm: int) -> int:
    for j in range(1, F.m // bm + 1):
        if (F.m // bm) % j == 0 and F.in_subfield(a, bm * j):
            return j
    return F.m // bm


def bound_table(q: int, k: int, d: int, cross_check: bool = True) -> BoundTable:
    if q < 2 or k < 0 or d < 1:
        raise ValueError("need q >= 2, k >= 0, d >= 1")
    per = [exact_degree_count(q, k, j) for j in range(1, d + 1)]
    total = sum(per)
    enumerated = None
    L = math.lcm(*range(1, d + 1))
    if cross_check and q ** (L * k) <= max_enum("bound") and q ** L <= max_enum("field"):
        enumerated = enumerate_bound(q, k, d)
        if enumerated != total:
            raise CheckFailed(f"bound formula {total} disagrees with enumeration {enumerated}")
    return BoundTable(q, k, d, per, total, enumerated)


# -- corpus -----------------------------------------------------------------------

@dataclass
class CorpusSpec:
    q: int = 2
    k_min: int = 1
    k_max: int = 3
    samples: int = 100
    seed: int = 1
    exp_cap: int = 24
    prec: int = 16
    support: tuple = (-3, 6)
    centers: int = 10
    oracle_every: int = 0  # run the oracle on every n-th instance (0 = never)
    oracle_prec: int = 8
    oracle_window: tuple = (-3, 4)
    transforms: bool = False
    phi: bool = True
    inject: list = dc_field(default_factory=list)  # extra instances in text form
    jobs: int = 1

    @classmethod
    def from_json(cls, data: dict) -> "CorpusSpec":
        data = dict(data)
        for key in ("support", "oracle_window"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


def random_series(rng: random.Random, field: SeriesField, support=(-3, 6)) -> LaurentSeries:
    lo, hi = support
    F = field.residue
    lead = rng.randint(lo, hi)
    length = rng.randint(1, hi - lead + 1)
    coeffs = [rng.randrange(1, F.q)] + [rng.randrange(F.q) for _ in range(length - 1)]
    return LaurentSeries.make(field, lead, coeffs)


def random_sparse(rng: random.Random, field: SeriesField, k: int, exp_cap: int, support=(-3, 6)) -> SparsePoly:
    exps = sorted(rng.sample(range(exp_cap + 1), k + 1))
    return SparsePoly.make(field, [(n, random_series(rng, field, support)) for n in exps])


def corpus(spec: CorpusSpec):
    """Yield (index, SparsePoly); deterministic in (seed, q, index)."""
    K = series_field(field_of_size(spec.q))
    n = 0
    for src in spec.inject:
        yield n, parse_poly(src, K)
        n += 1
    for i in range(spec.samples):
        rng = random.Random(f"{spec.seed}:{spec.q}:{i}")
        k = rng.randint(spec.k_min, spec.k_max)
        yield n, random_sparse(rng, K, k, spec.exp_cap, spec.support)
        n += 1


# -- single-instance verification ----------------------------------------------------

def _random_center(rng, K: SeriesField, g: int, roots: list[RootRecord], prec: int) -> LaurentSeries:
    """A point of valuation g: either random or a perturbed truncation of a root."""
    F = K.residue
    near = [r for r in roots if not r.is_zero() and r.value.order == g]
    if near and rng.random() < 0.6:
        z = rng.choice(near).value
        depth = rng.randint(1, max(1, prec // 2))
        t = z.truncate(g + depth).as_exact()
        return t + K.monomial(rng.randrange(1, F.q), g + depth)
    L = rng.randint(1, max(1, prec // 2))
    return LaurentSeries.make(K, g, [rng.randrange(1, F.q)] + [rng.randrange(F.q) for _ in range(L - 1)])


def distance_checks(f: SparsePoly, poly: NewtonPolygon, roots: list[RootRecord], rng, centers: int, prec: int):
    """Distinct distances to roots, and the recentred-rank chain, at random non-root centres."""
    k = f.k
    K = f.field
    violations = []
    ran = 0
    usable = [r for r in roots if r.resolved and not r.is_zero()]
    for seg in poly.segments:
        if seg.g.denominator != 1:
            continue
        g, u = int(seg.g), seg.order_pos
        done = tries = 0
        while done < centers and tries < 20 * centers:
            tries += 1
            r = _random_center(rng, K, g, usable, prec)
            if f(r).is_zero():
                continue
            dists = []
            ambiguous = False
            for a in usable:
                d = a.value - r
                if d.looks_zero():
                    ambiguous = True
                    break
                if d.order > g:
                    dists.append(d.order)
            if ambiguous:
                continue
            done += 1
            ran += 1
            if len(set(dists)) > k + 1 - u:
                violations.append(f"distances: r={r} u={u} got {len(set(dists))} > {k + 1 - u}")
            if f.degree <= 256:
                b, _ = recenter(f, r)
                scaled = [bj * (r ** j) for j, bj in enumerate(b)]
                orders = [x.lower_order() for x in scaled]
                low = min(orders)
                M = orders.index(low)
                distinct = {o for o in orders[:M] if o != float("inf")}
                if len(distinct) > k + 1 - u:
                    violations.append(f"rank chain: r={r} u={u} got {len(distinct)} > {k + 1 - u}")
                if M > seg.N:
                    violations.append(f"M={M} exceeds N_u={seg.N} at r={r}")
    return ran, violations


def tree_checks(poly: NewtonPolygon, roots: list[RootRecord], q: int, k: int):
    stats = {"trees": 0, "max_length": 0, "max_children": 0}
    violations = []
    by_g = defaultdict(list)
    for r in roots:
        if r.resolved and not r.is_zero():
            by_g[r.value.order].append(r.value)
    for seg in poly.segments:
        if seg.g.denominator != 1:
            continue
        g, u = int(seg.g), seg.order_pos
        zs = by_g.get(g, [])
        if len(zs) > (q - 1) * q ** (k - u):
            violations.append(f"Z_u: {len(zs)} roots at u={u} exceed (q-1)q^(k-u)={(q - 1) * q ** (k - u)}")
        cosets = defaultdict(list)
        for z in zs:
            cosets[z.coefficient(g)].append(z)
        for pts in cosets.values():
            t = build_tree(pts)
            ell = tree_length(t)
            mc = t.max_children()
            stats["trees"] += 1
            stats["max_length"] = max(stats["max_length"], ell)
            stats["max_children"] = max(stats["max_children"], mc)
            if ell > k - u:
                violations.append(f"tree length {ell} > k-u={k - u} (u={u})")
            if mc > q:
                violations.append(f"{mc} children > q={q}")
    return stats, violations


def phi_checks(f: SparsePoly, poly: NewtonPolygon, roots: list[RootRecord], j_of=None):
    """Injectivity and F_{q^j}-rationality of Phi on a complete unramified root set."""
    vals = [r.value for r in roots]
    img = phi_map(vals, poly, f.k)
    violations = []
    if len(set(img.values())) != len(img):
        violations.append("Phi is not injective")
    base_m = f.field.base.m
    for i, r in enumerate(roots):
        j = r.degree_over_K if isinstance(r.degree_over_K, int) else None
        F = r.value.field.residue
        if j is not None and not all(F.in_subfield(c, base_m * j) for c in img[i].coeffs):
            violations.append(f"Phi({r.value}) not defined over F_(q^{j})")
    return img, violations


def transform_checks(f: SparsePoly, roots: list[RootRecord], prec: int):
    violations = []
    g, s = pth_power_reduce(f)
    rg = roots_in(g, prec=prec)
    if len(rg) != len(roots):
        violations.append(f"p-th power reduction changed distinct count {len(roots)} -> {len(rg)}")
    m = f.degree + 1
    rev = transform_reverse(f, m)
    rr = roots_in(rev, prec=prec)
    nz_f = [r for r in roots if not r.is_zero()]
    nz_r = [r for r in rr if not r.is_zero()]
    if len(nz_f) != len(nz_r):
        violations.append(f"reverse: {len(nz_f)} nonzero roots vs {len(nz_r)}")
    elif nz_f and all(r.resolved for r in nz_f + nz_r):
        half = max(1, prec // 2)
        inv = {(r.value.inverse()).truncate(-r.value.order + half) for r in nz_f}
        got = {r.value.truncate(r.value.order + half) for r in nz_r}
        if inv != got:
            violations.append("reverse: z -> 1/z is not a bijection of nonzero roots")
    if not any(r.is_zero() for r in rr):
        violations.append("reverse lost the root 0")
    return violations


def oracle_check(f: SparsePoly, roots: list[RootRecord], prec: int, window) -> tuple[bool, dict]:
    """Resolved roots, truncated to the oracle's precision, against oracle_roots.

    Oracle points inside the disk of an unresolved cluster are excused:
    neither side can certify a multiple root that is not a Laurent polynomial.
    """
    lo, hi = window
    orc = oracle_roots(f, prec, window)
    mine = set()
    clusters = [r for r in roots if not r.resolved]
    for r in roots:
        if r.is_zero():
            mine.add(r.value)
        elif r.resolved and lo <= r.value.order <= hi:
            mine.add(r.truncated(prec))

    def in_cluster(x):
        for c in clusters:
            n = min(x.prec if x.prec is not None else c.value.prec, c.value.prec)
            if (x.truncate(n) - c.value.truncate(n)).looks_zero():
                return True
        return False

    kept = {x for x in orc if x in mine or not in_cluster(x)}
    detail = {"oracle": sorted(map(str, orc)), "found": sorted(map(str, mine)), "clusters": len(clusters)}
    return kept == mine, detail


def verify_instance(f: SparsePoly, prec: int = 16, rng: random.Random | None = None, centers: int = 10,
                    oracle: tuple | None = None, transforms: bool = False, phi: bool = True) -> dict:
    """Every check of the campaign on one polynomial over K."""
    rng = rng or random.Random(0)
    q, k = f.field.q, f.k
    t0 = time.perf_counter()
    poly = proper_polygon(f)
    roots = roots_in(f, prec=prec)
    count = len(roots)
    unresolved = sum(not r.resolved for r in roots)
    v = []
    Ns = [s.N for s in poly.segments]
    if Ns != sorted(Ns, reverse=True):
        v.append("proper order is not N-descending")
    if count > q ** k:
        v.append(f"ROOT BOUND: {count} roots > q^k = {q ** k}")
    # Newton-polygon consistency
    mult = Counter()
    for r in roots:
        if r.is_zero():
            continue
        seg = poly.segment_for(Fraction(r.value.order))
        if seg is None:
            v.append(f"root {r.value} has valuation matching no segment")
        else:
            mult[seg.order_pos] += r.multiplicity
    for seg in poly.segments:
        if mult[seg.order_pos] > seg.h_len:
            v.append(f"segment u={seg.order_pos}: multiplicity {mult[seg.order_pos]} > h_len {seg.h_len}")
    for r in roots:
        if r.resolved and not r.exact and not r.is_zero():
            fz = f(r.value)
            need = r.certified_prec - r.value.order + min(a.order + n * r.value.order for n, a in f.terms)
            if fz.lower_order() < need:
                v.append(f"Hensel certificate failed for {r.value}")
    tstats, tv = tree_checks(poly, roots, q, k)
    v += tv
    ran, dv = distance_checks(f, poly, roots, rng, centers, prec)
    v += dv
    phi_ok = None
    if phi and unresolved == 0:
        _, pv = phi_checks(f, poly, roots)
        v += pv
        phi_ok = not pv
    oracle_ok = None
    if oracle is not None:
        oprec, window = oracle
        oracle_ok, _ = oracle_check(f, roots, oprec, window)
        if not oracle_ok:
            v.append("roots_in disagrees with the brute-force oracle")
    if transforms:
        v += transform_checks(f, roots, prec)
    return {
        "poly": str(f),
        "q": q,
        "k": k,
        "count": count,
        "bound": q ** k,
        "slack": q ** k - count,
        "unresolved": unresolved,
        "proper_order": [[str(s.g), s.N] for s in poly.segments],
        "tree": tstats,
        "distance_centers": ran,
        "distance_segments": sum(seg.g.denominator == 1 for seg in poly.segments),
        "phi_ok": phi_ok,
        "oracle_ok": oracle_ok,
        "prec": prec,
        "violations": v,
        "passed": not v,
        "seconds": round(time.perf_counter() - t0, 4),
    }


def _run_one(args):
    spec, idx, src = args
    K = series_field(field_of_size(spec.q))
    f = parse_poly(src, K)
    rng = random.Random(f"centers:{spec.seed}:{spec.q}:{idx}")
    oracle = None
    if spec.oracle_every and idx % spec.oracle_every == 0:
        oracle = (spec.oracle_prec, spec.oracle_window)
    try:
        rep = verify_instance(f, spec.prec, rng, spec.centers, oracle, spec.transforms, spec.phi)
    except (PrecisionError, CapExceeded) as exc:
        rep = {"poly": src, "q": spec.q, "k": f.k, "count": None, "bound": spec.q ** f.k,
               "violations": [], "passed": True, "skipped": f"{type(exc).__name__}: {exc}"}
    except CheckFailed as exc:
        rep = {"poly": src, "q": spec.q, "k": f.k, "count": None, "bound": spec.q ** f.k,
               "violations": [str(exc)], "passed": False}
    rep["index"] = idx
    return rep


@dataclass
class VerifyReport:
    spec: CorpusSpec
    instances: list
    seconds: float

    @property
    def passed(self) -> bool:
        return all(r["passed"] for r in self.instances)

    def summary(self) -> dict:
        rows = defaultdict(lambda: {"samples": 0, "max_count": 0, "bound": 0, "equality_hits": 0})
        for r in self.instances:
            row = rows[r["k"]]
            row["samples"] += 1
            row["bound"] = r["bound"]
            if r.get("count") is not None:
                row["max_count"] = max(row["max_count"], r["count"])
                row["equality_hits"] += r["count"] == r["bound"]
        return {
            "schema": "v1",
            "q": self.spec.q,
            "samples": len(self.instances),
            "failures": [r["index"] for r in self.instances if not r["passed"]],
            "skipped": [r["index"] for r in self.instances if r.get("skipped")],
            "unresolved_clusters": sum(r.get("unresolved") or 0 for r in self.instances),
            "oracle_runs": sum(r.get("oracle_ok") is not None for r in self.instances),
            "seconds": round(self.seconds, 3),
            "passed": self.passed,
            "table": [{"q": self.spec.q, "k": k, **row} for k, row in sorted(rows.items())],
        }

    def write(self, outdir: str | Path) -> dict:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "instances.jsonl", "w") as fh:
            for r in self.instances:
                fh.write(json.dumps(r) + "\n")
        summ = self.summary()
        (out / "summary.json").write_text(json.dumps(summ, indent=2))
        with open(out / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q", "k", "samples", "max_count", "bound", "equality_hits"])
            for row in summ["table"]:
                w.writerow([row[c] for c in ("q", "k", "samples", "max_count", "bound", "equality_hits")])
        fails = [r for r in self.instances if not r["passed"]]
        if fails:
            repro = out / "reproducers.txt"
            repro.write_text("".join(f"# q={r['q']} index={r['index']} seed={self.spec.seed}\n{r['poly']}\n" for r in fails))
            summ["reproducers"] = str(repro)
        return summ


def run_campaign(spec: CorpusSpec) -> VerifyReport:
    t0 = time.perf_counter()
    work = [(spec, i, str(f)) for i, f in corpus(spec)]
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as ex:
            reps = list(ex.map(_run_one, work, chunksize=8))
    else:
        reps = [_run_one(w) for w in work]
    return VerifyReport(spec, reps, time.perf_counter() - t0)


def multiplicity_family(q: int, m: int, prec: int = 16) -> dict:
    """(1+x)^{q^m}: one distinct zero whose multiplicity grows without bound."""
    K = series_field(field_of_size(q))
    N = q ** m
    f = SparsePoly.make(K, [(0, K.one()), (N, K.one())])
    recs = roots_in(f, prec=prec)
    return {
        "schema": "v1",
        "q": q,
        "m": m,
        "poly": str(f),
        "distinct": len(recs),
        "multiplicities": [r.multiplicity for r in recs],
        "roots": [str(r.value) for r in recs],
        "passed": len(recs) == 1 and recs[0].multiplicity == N,
    }
