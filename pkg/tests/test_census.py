import csv
import json

import pytest
from hypothesis import given, strategies as st

from sparsezeros import census
from sparsezeros.census import (
    E1,
    CorpusSpec,
    bound_table,
    corpus,
    divisors,
    exact_degree_count,
    mobius,
    multiplicity_family,
    run_campaign,
    verify_instance,
)
from sparsezeros.parser import parse_poly


def mobius_naive(n):
    fs = [p for p in range(2, n + 1) if n % p == 0 and all(p % d for d in range(2, p))]
    if any(n % (p * p) == 0 for p in fs):
        return 0
    return (-1) ** len(fs)


def test_mobius_examples():
    assert (mobius(1), mobius(4), mobius(6)) == (1, 0, 1)
    with pytest.raises(ValueError):
        mobius(0)


@given(st.integers(1, 3000))
def test_mobius_matches_definition(n):
    assert mobius(n) == mobius_naive(n)


def test_bound_examples():
    t = bound_table(2, 2, 2)
    assert t.per_degree == [4, 12] and t.total == 16 and t.enumerated == 16
    assert bound_table(2, 1, 2).total == 4
    assert bound_table(3, 1, 2).total == 9


@given(st.sampled_from([2, 3, 4, 5, 7, 8, 9]), st.integers(0, 6))
def test_d1_is_q_to_the_k(q, k):
    assert bound_table(q, k, 1, cross_check=False).total == q ** k


@given(st.sampled_from([2, 3, 4, 5]), st.integers(0, 5), st.integers(1, 12))
def test_mobius_inversion_reconstructs_q_to_the_jk(q, k, n):
    assert sum(exact_degree_count(q, k, j) for j in divisors(n)) == q ** (n * k)
    assert exact_degree_count(q, k, n) >= 0


@pytest.mark.parametrize("q,k,d", [(2, 1, 3), (2, 2, 3), (3, 1, 2), (3, 2, 2), (4, 1, 2), (2, 3, 2)])
def test_bound_agrees_with_enumeration(q, k, d):
    t = bound_table(q, k, d)
    assert t.enumerated == t.total


def test_bound_uses_big_integers():
    assert bound_table(9, 30, 3, cross_check=False).total > 2 ** 200


def test_corpus_is_deterministic():
    spec = CorpusSpec(q=3, samples=20, seed=7)
    a = [str(f) for _, f in corpus(spec)]
    b = [str(f) for _, f in corpus(spec)]
    assert a == b and len(set(a)) > 15
    assert a != [str(f) for _, f in corpus(CorpusSpec(q=3, samples=20, seed=8))]


def test_corpus_respects_model():
    spec = CorpusSpec(q=4, k_min=2, k_max=3, samples=50, seed=1, exp_cap=17)
    for _, f in corpus(spec):
        assert 2 <= f.k <= 3 and f.degree <= 17
        for _, a in f.terms:
            assert -3 <= a.lead and a.end - 1 <= 6 and a.is_exact()


def test_e1_instance_attains_equality(K2):
    rep = verify_instance(parse_poly(E1, K2), oracle=(6, (-3, 4)), transforms=True)
    assert rep["passed"] and rep["count"] == rep["bound"] == 4 and rep["slack"] == 0
    assert rep["oracle_ok"] and rep["phi_ok"]


@pytest.mark.parametrize("q", [2, 4])
def test_multiplicity_family(q):
    for m in range(1, 7):
        rep = multiplicity_family(q, m)
        assert rep["distinct"] == 1 and rep["multiplicities"] == [q ** m]


def test_campaign_q2_500():
    rep = run_campaign(CorpusSpec(q=2, k_min=1, k_max=3, samples=500, seed=1, inject=[E1]))
    assert rep.passed
    assert all(r["count"] <= r["bound"] for r in rep.instances)
    assert rep.instances[0]["count"] == 4
    assert len(rep.instances) == 501


def test_campaign_is_deterministic_and_parallel_safe():
    spec = CorpusSpec(q=3, samples=24, seed=3)
    a = run_campaign(spec)
    spec.jobs = 2
    b = run_campaign(spec)
    strip = lambda rs: [{k: v for k, v in r.items() if k != "seconds"} for r in rs]
    assert strip(a.instances) == strip(b.instances)


def test_reports_are_written(tmp_path):
    rep = run_campaign(CorpusSpec(q=2, samples=10, seed=2))
    summ = rep.write(tmp_path)
    lines = (tmp_path / "instances.jsonl").read_text().splitlines()
    assert len(lines) == 10 and all(json.loads(ln)["passed"] for ln in lines)
    assert json.loads((tmp_path / "summary.json").read_text())["schema"] == "v1"
    rows = list(csv.DictReader(open(tmp_path / "summary.csv")))
    assert set(rows[0]) == {"q", "k", "samples", "max_count", "bound", "equality_hits"}
    assert summ["passed"] and not (tmp_path / "reproducers.txt").exists()


def test_failures_leave_reproducers(tmp_path, monkeypatch, K2):
    real = census.verify_instance

    def broken(f, *a, **kw):
        rep = real(f, *a, **kw)
        rep["violations"].append("injected")
        rep["passed"] = False
        return rep

    monkeypatch.setattr(census, "verify_instance", broken)
    rep = run_campaign(CorpusSpec(q=2, samples=3, seed=2))
    summ = rep.write(tmp_path)
    text = (tmp_path / "reproducers.txt").read_text()
    assert not rep.passed and summ["failures"] == [0, 1, 2]
    polys = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert [str(parse_poly(p, K2)) for p in polys] == [r["poly"] for r in rep.instances]


def test_corpus_spec_from_json():
    s = CorpusSpec.from_json({"q": 3, "support": [-1, 2], "oracle_window": [0, 1]})
    assert s.support == (-1, 2) and s.oracle_window == (0, 1)


@pytest.mark.parametrize("q,basis", [(2, ["1", "T", "T^2"]), (3, ["1", "T"]), (2, ["T^-1", "1 + T", "T^3"])])
def test_checks_on_extremal_instances(q, basis):
    from sparsezeros.extremal import SubspaceSpec, subspace_poly
    from sparsezeros.fields import field_of_size
    from sparsezeros.laurent import series_field
    from sparsezeros.parser import parse_series

    K = series_field(field_of_size(q))
    f = subspace_poly(SubspaceSpec(K, K.base, tuple(parse_series(b, K) for b in basis)))
    rep = verify_instance(f, centers=15, transforms=True)
    assert rep["passed"], rep["violations"]
    assert rep["count"] == q ** len(basis) and rep["tree"]["max_length"] >= 1
    assert rep["distance_centers"] >= 15 * rep["distance_segments"]
