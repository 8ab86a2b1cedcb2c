"""Command-line interface: ``sparsezeros <subcommand> ...``.

Exit codes: 0 all checks passed, 1 usage or parse error, 2 a check failed,
3 an enumeration cap or the working precision was exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

from . import __version__
from .census import CorpusSpec, bound_table, run_campaign, verify_instance
from .errors import CapExceeded, CheckFailed, FieldError, ParseError, PrecisionError
from .extremal import SubspaceSpec, subspace_poly, verify_sharpness_thm1, verify_sharpness_thm2, verify_xe_variant
from .fields import fq_make, is_prime
from .laurent import series_field
from .newton import polygon, proper_polygon
from .parser import parse_poly, parse_series
from .poly import SparsePoly
from .roots import oracle_roots, roots_deg_le_d, roots_in
from .trees import build_tree, phi_label, phi_map

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument handling ----------------------------------------------------------

def _field_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("field")
    g.add_argument("--q", type=int, help="residue field size q = p^m (default 2)")
    g.add_argument("--p", type=int, help="characteristic")
    g.add_argument("--m", type=int, help="residue degree over F_p")
    g.add_argument("--e", type=int, default=1, help="search in F_(q^j)((T^(1/e))) (default 1)")
    g.add_argument("--j", type=int, default=1, help="residue extension degree of the search field (default 1)")


def _input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("expr", nargs="?", help="polynomial in the text grammar")
    p.add_argument("--file", help="read the polynomial text from a file")
    p.add_argument("--from-json", dest="from_json", help="read a v1 polynomial JSON document")


def _output_flags(p: argparse.ArgumentParser, dot: bool = False) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON output")
    g.add_argument("--text", dest="fmt", action="store_const", const="text", help="text output (default)")
    if dot:
        g.add_argument("--dot", dest="fmt", action="store_const", const="dot", help="Graphviz DOT output")


def _base_field(args):
    q, p, m = args.q, args.p, args.m
    if p is not None and not is_prime(p):
        raise UsageError(f"--p {p} is not prime")
    if p is not None:
        m = m or 1
        if q is not None and q != p ** m:
            raise UsageError(f"--q {q} is inconsistent with --p {p} --m {m}")
        return fq_make(p, m)
    if m is not None and q is None:
        raise UsageError("--m needs --p")
    q = q or 2
    for pp in range(2, q + 1):
        if q % pp == 0:
            mm, r = 0, q
            while r % pp == 0:
                r //= pp
                mm += 1
            if r != 1 or not is_prime(pp):
                raise UsageError(f"--q {q} is not a prime power")
            if m is not None and m != mm:
                raise UsageError(f"--q {q} is inconsistent with --m {m}")
            return fq_make(pp, mm)
    raise UsageError(f"--q {q} is not a prime power")


def _read_poly(args, K) -> SparsePoly:
    sources = [s for s in (args.expr, args.file, args.from_json) if s is not None]
    if len(sources) != 1:
        raise UsageError("give exactly one input: EXPR, --file or --from-json")
    if args.from_json:
        f = SparsePoly.from_json(json.loads(Path(args.from_json).read_text()))
        if f.field.base != K.base:
            raise UsageError("the JSON polynomial's field differs from the field flags")
        return f
    text = Path(args.file).read_text() if args.file else args.expr
    return parse_poly(text, K)


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"--window expects lo:hi, got {text!r}") from None
    if lo > hi:
        raise UsageError("--window needs lo <= hi")
    return lo, hi


def _emit(obj, fmt: str, text: str) -> None:
    print(json.dumps(obj, indent=2) if fmt == "json" else text)


def _search_field(args, K):
    if args.e < 1 or args.j < 1:
        raise UsageError("--e and --j must be >= 1")
    return series_field(K.base, args.j, args.e)


# -- subcommands ----------------------------------------------------------------

def cmd_polygon(args) -> int:
    K = series_field(_base_field(args))
    f = _read_poly(args, K)
    raw = polygon(f).to_json()
    proper = proper_polygon(f)
    out = {"schema": "v1", "poly": str(f), "k": f.k, "polygon": raw, "proper": proper.to_json()}
    lines = [f"f = {f}", f"k = {f.k}", "segments in proper order (u, slope, g, N, length):"]
    for s in proper.segments:
        lines.append(f"  u={s.order_pos}  slope={s.slope}  g={s.g}  N={s.N}  h={s.h_len}")
    if proper.zero_root_mult:
        lines.append(f"root 0 with multiplicity {proper.zero_root_mult}")
    _emit(out, args.fmt, "\n".join(lines))
    return EXIT_OK


def _root_lines(recs) -> list[str]:
    lines = []
    for r in recs:
        tag = "exact" if r.exact else ("certified" if r.resolved else "UNRESOLVED")
        extra = f" to O(S^{r.certified_prec})" if r.certified_prec is not None and not r.exact else ""
        lines.append(f"  {r.value}   [{tag}{extra}, mult {r.multiplicity}, (j,e)={r.home}, deg {r.degree_over_K}]")
    return lines


def cmd_roots(args) -> int:
    K = series_field(_base_field(args))
    f = _read_poly(args, K)
    q = K.q
    if args.deg is not None:
        recs = roots_deg_le_d(f, args.deg, args.prec)
        bound = bound_table(q, f.k, args.deg, cross_check=False).total
        kind = f"sum_(j<={args.deg}) sum_(i|j) q^(ik) mu(j/i)"
    else:
        recs = roots_in(f, _search_field(args, K), args.prec)
        bound = q ** f.k if (args.j, args.e) == (1, 1) else None
        kind = "q^k"
    count = len(recs)
    summary = {
        "count": count,
        "bound": bound,
        "bound_kind": kind,
        "slack": None if bound is None else bound - count,
        "equality": bound is not None and count == bound,
        "unresolved": sum(not r.resolved for r in recs),
        "k": f.k,
    }
    if args.deg is not None:
        summary["completeness"] = "tame lattice only: wildly ramified zeros are not searched"
    out = {"schema": "v1", "poly": str(f), "q": q, "prec": args.prec, "roots": [r.to_json() for r in recs],
           "summary": summary}
    lines = [f"f = {f}", f"{count} distinct root(s):", *_root_lines(recs)]
    if bound is not None:
        lines.append(f"bound {kind} = {bound}, slack {bound - count}" + (" (equality)" if count == bound else ""))
    if "completeness" in summary:
        lines.append(f"note: {summary['completeness']}")
    _emit(out, args.fmt, "\n".join(lines))
    if bound is not None and count > bound:
        print("root count exceeds the bound", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_oracle(args) -> int:
    K = series_field(_base_field(args))
    f = _read_poly(args, K)
    window = _window(args.window)
    found = oracle_roots(f, args.prec, window, _search_field(args, K), args.confirm_depth)
    vals = sorted(found, key=lambda x: (x.lower_order(), str(x)))
    out = {"schema": "v1", "poly": str(f), "prec": args.prec, "window": list(window),
           "roots": [str(x) for x in vals], "count": len(vals)}
    _emit(out, args.fmt, "\n".join([f"f = {f}", f"{len(vals)} point(s):", *(f"  {x}" for x in vals)]))
    return EXIT_OK


def _label_field(text: str | None, base):
    if text is None:
        return base
    t = text.replace(" ", "")
    if t.startswith("q^"):
        return fq_make(base.p, base.m * int(t[2:]))
    size = int(t)
    F = fq_make(base.p, base.m)
    m = base.m
    while F.q < size:
        m += base.m
        F = fq_make(base.p, m)
    if F.q != size:
        raise UsageError(f"--F {text} is not a power of q = {base.q}")
    return F


def cmd_extremal(args) -> int:
    base = _base_field(args)
    F = _label_field(args.F, base)
    K = series_field(base)
    amb = series_field(base, F.m // base.m)
    basis = tuple(parse_series(b, amb) for b in args.basis.split(","))
    c = parse_series(args.c, amb) if args.c else None
    if args.d is not None:
        spec = SubspaceSpec(K, F, basis, c)
        rep = verify_sharpness_thm2(spec, args.d, args.prec)
    elif args.xe is not None:
        rep = verify_xe_variant(SubspaceSpec(K, F, basis, c), args.xe, args.prec, oracle=args.oracle)
    else:
        # F-subspace polynomials are extremal for F((T)) itself
        KF = series_field(F)
        basis = tuple(parse_series(b, KF) for b in args.basis.split(","))
        c = parse_series(args.c, KF) if args.c else None
        spec = SubspaceSpec(KF, F, basis, c)
        rep = verify_sharpness_thm1(spec, args.prec)
    lines = [f"f = {rep['poly']}", f"check {rep['check']}: count {rep['count']}, bound {rep['bound']}"]
    if "per_degree" in rep:
        lines.append(f"per degree {rep['per_degree']} (expected {rep['expected_per_degree']})")
    if "status" in rep:
        lines.append(f"status {rep['status']}")
    lines.append("PASS" if rep["passed"] else "FAIL")
    _emit(rep, args.fmt, "\n".join(lines))
    return EXIT_OK if rep["passed"] else EXIT_CHECK


def cmd_tree(args) -> int:
    K = series_field(_base_field(args))
    f = _read_poly(args, K)
    recs = roots_in(f, prec=args.prec)
    if any(not r.resolved for r in recs):
        raise PrecisionError("unresolved clusters: raise --prec to build trees")
    poly = proper_polygon(f)
    vals = [r.value for r in recs]
    phi = phi_map(vals, poly, f.k)
    groups = defaultdict(list)
    for i, z in enumerate(vals):
        if not z.is_zero():
            groups[(z.order, z.coefficient(z.order))].append(i)
    trees = []
    for (g, _), idx in sorted(groups.items()):
        u = poly.segment_for(Fraction(g)).order_pos
        t = phi_label(build_tree([vals[i] for i in idx]), g)
        trees.append((g, u, t))
    if args.fmt == "json":
        out = {"schema": "v1", "poly": str(f), "k": f.k,
               "trees": [{"g": g, "u": u, "tree": t.to_json()} for g, u, t in trees],
               "phi": {str(vals[i]): list(im.coeffs) for i, im in phi.items()}}
        print(json.dumps(out, indent=2))
    else:
        lines = ["digraph roots {"]
        for n, (g, u, t) in enumerate(trees):
            lines.append(f"  subgraph cluster_{n} {{")
            lines.append(f'  label="g={g} u={u}";')
            lines += ["  " + ln for ln in t.dot_body(f"t{n}_")]
            lines.append("  }")
        for i, im in phi.items():
            lines.append(f"  // Phi({vals[i]}) = {list(im.coeffs)}")
        lines.append("}")
        print("\n".join(lines))
    return EXIT_OK


def cmd_bound(args) -> int:
    t = bound_table(args.q, args.k, args.d)
    text = "\n".join([f"q={t.q} k={t.k} d={t.d}", *(f"  c_{j} = {c}" for j, c in enumerate(t.per_degree, 1)),
                      f"total = {t.total}" + (f" (enumeration agrees)" if t.enumerated is not None else "")])
    _emit(t.to_json(), args.fmt, text)
    return EXIT_OK


def _write_repro(outdir: str, text: str) -> Path:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"repro-{hashlib.sha1(text.encode()).hexdigest()[:10]}.txt"
    path.write_text(text + "\n")
    return path


def cmd_verify(args) -> int:
    base = _base_field(args)
    K = series_field(base)
    f = _read_poly(args, K)
    oracle = (args.oracle_prec, _window(args.window)) if args.oracle_prec else None
    rep = verify_instance(f, args.prec, None, args.centers, oracle, transforms=True)
    rep = {"schema": "v1", **rep}
    lines = [f"f = {f}", f"count {rep['count']} <= q^k = {rep['bound']}", f"trees {rep['tree']}",
             f"distance centres {rep['distance_centers']}, Phi ok {rep['phi_ok']}, oracle ok {rep['oracle_ok']}"]
    lines += [f"VIOLATION: {v}" for v in rep["violations"]]
    lines.append("PASS" if rep["passed"] else "FAIL")
    if not rep["passed"]:
        path = _write_repro(args.out, f"# q={base.q}\n{f}")
        rep["reproducer"] = str(path)
        print(f"reproducer written to {path}", file=sys.stderr)
    _emit(rep, args.fmt, "\n".join(lines))
    return EXIT_OK if rep["passed"] else EXIT_CHECK


def cmd_campaign(args) -> int:
    cfg = json.loads(Path(args.config).read_text())
    runs = cfg.get("runs", [cfg]) if isinstance(cfg, dict) else cfg
    outdir = Path(args.out or (cfg.get("out") if isinstance(cfg, dict) else None) or "campaign-report")
    summaries = []
    ok = True
    for n, run in enumerate(runs):
        run = {k: v for k, v in run.items() if k not in ("out", "runs")}
        spec = CorpusSpec.from_json(run)
        if args.jobs:
            spec.jobs = args.jobs
        rep = run_campaign(spec)
        summ = rep.write(outdir / f"run{n}-q{spec.q}")
        summaries.append(summ)
        ok &= rep.passed
        if not rep.passed:
            print(f"campaign failures; reproducers in {summ['reproducers']}", file=sys.stderr)
    out = {"schema": "v1", "out": str(outdir), "runs": summaries, "passed": ok}
    lines = []
    for s in summaries:
        for row in s["table"]:
            lines.append(f"q={row['q']} k={row['k']} samples={row['samples']} max_count={row['max_count']} "
                         f"bound={row['bound']} equality_hits={row['equality_hits']}")
        lines.append(f"  failures={len(s['failures'])} unresolved={s['unresolved_clusters']} {s['seconds']}s")
    lines.append("PASS" if ok else "FAIL")
    _emit(out, args.fmt, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CHECK


# -- wiring ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sparsezeros", description="Distinct zeros of sparse polynomials over F_q((T)).")
    ap.add_argument("--version", action="version", version=f"sparsezeros {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("polygon", help="Newton polygon, N_j and proper order")
    _input_flags(p), _field_flags(p), _output_flags(p)
    p.set_defaults(run=cmd_polygon)

    p = sub.add_parser("roots", help="distinct roots in K, or of degree <= d with --deg")
    _input_flags(p), _field_flags(p), _output_flags(p)
    p.add_argument("--deg", type=int, help="all roots of degree <= d over K (tame lattice search)")
    p.add_argument("--prec", type=int, default=16)
    p.set_defaults(run=cmd_roots)

    p = sub.add_parser("oracle", help="brute-force root set")
    _input_flags(p), _field_flags(p), _output_flags(p)
    p.add_argument("--prec", type=int, default=6)
    p.add_argument("--window", default="-3:4", help="valuation window lo:hi")
    p.add_argument("--confirm-depth", dest="confirm_depth", type=int,
                   help="digits of confirmation per candidate (0 = the bare cluster criterion)")
    p.set_defaults(run=cmd_oracle)

    p = sub.add_parser("extremal", help="subspace polynomial and sharpness report")
    _field_flags(p), _output_flags(p)
    p.add_argument("--basis", required=True, help='comma-separated series, e.g. "1,T"')
    p.add_argument("--F", help="label field: size or q^i (default F_q)")
    p.add_argument("--c", help="nonzero constant factor")
    p.add_argument("--d", type=int, help="check the degree-d bound (basis must lie in K)")
    p.add_argument("--xe", type=int, help="count K-roots of f(x^e)")
    p.add_argument("--oracle", action="store_true", help="cross-check --xe with the oracle")
    p.add_argument("--prec", type=int, default=16)
    p.set_defaults(run=cmd_extremal)

    p = sub.add_parser("tree", help="disk trees of the K-roots with Phi labels")
    _input_flags(p), _field_flags(p), _output_flags(p, dot=True)
    p.add_argument("--prec", type=int, default=16)
    p.set_defaults(run=cmd_tree)

    p = sub.add_parser("bound", help="degree-d bound table")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    _output_flags(p)
    p.set_defaults(run=cmd_bound)

    p = sub.add_parser("campaign", help="random-corpus verification campaign")
    p.add_argument("--config", required=True, help="JSON corpus spec, or {\"runs\": [...], \"out\": dir}")
    p.add_argument("--out", help="report directory (default campaign-report)")
    p.add_argument("--jobs", type=int, help="worker processes")
    _output_flags(p)
    p.set_defaults(run=cmd_campaign)

    p = sub.add_parser("verify", help="every campaign check on one polynomial")
    _input_flags(p), _field_flags(p), _output_flags(p)
    p.add_argument("--prec", type=int, default=16)
    p.add_argument("--centers", type=int, default=10, help="random centres per segment")
    p.add_argument("--oracle-prec", dest="oracle_prec", type=int, default=0, help="also run the oracle")
    p.add_argument("--window", default="-3:4")
    p.add_argument("--out", default=".", help="directory for the reproducer on failure")
    p.set_defaults(run=cmd_verify)
    return ap


def _fix_negative_window(argv: list[str]) -> list[str]:
    out = []
    it = iter(argv)
    for a in it:
        if a == "--window":
            nxt = next(it, None)
            out.append(f"--window={nxt}" if nxt is not None else a)
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _fix_negative_window(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "fmt", None) is None:
            args.fmt = "text"
        if getattr(args, "prec", 1) < 1:
            raise UsageError("--prec must be >= 1")
        return args.run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_CAP
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (FieldError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
