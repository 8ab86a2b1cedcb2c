import random

import pytest
from hypothesis import given, strategies as st

from sparsezeros.census import oracle_check, random_sparse
from sparsezeros.errors import CapExceeded, PrecisionError
from sparsezeros.fields import field_of_size
from sparsezeros.laurent import LaurentSeries, series_field
from sparsezeros.parser import parse_poly
from sparsezeros.poly import SparsePoly, evaluate
from sparsezeros.roots import UpperBound, lattice, oracle_roots, roots_deg_le_d, roots_in

from conftest import ser
from oracles import product_poly


def values(recs):
    return sorted(str(r.value) for r in recs)


def planted(K, roots):
    coeffs = product_poly(roots, K.one(), K.zero())
    return SparsePoly.make(K, [(n, c) for n, c in enumerate(coeffs) if not c.is_zero()])


@pytest.mark.parametrize("q", [2, 3, 4])
def test_x_q_minus_x(q):
    K = series_field(field_of_size(q))
    recs = roots_in(parse_poly(f"x^{q} - x", K))
    assert len(recs) == q
    assert all(r.exact and r.resolved for r in recs)
    assert {r.value for r in recs} == {K.const(c) for c in range(q)}


def test_e1_roots(e1):
    recs = roots_in(e1)
    assert values(recs) == ["0", "1", "1 + T", "T"]
    assert all(r.exact for r in recs)


def test_artin_schreier_like_roots(K2):
    recs = roots_in(parse_poly("x^2 + x + T", K2), prec=8)
    assert len(recs) == 2 and all(r.resolved and not r.exact for r in recs)
    want = ser("T + T^2 + T^4", K2)
    got = {r.value.truncate(8) for r in recs}
    assert got == {want.truncate(8), (want + K2.one()).truncate(8)}


def test_no_root_for_odd_slope(K2):
    assert roots_in(parse_poly("x^2 + T", K2)) == []


def test_multiplicity_is_reported(K2):
    (r,) = roots_in(parse_poly("1 + x^8", K2))
    assert r.multiplicity == 8 and str(r.value) == "1"


def test_cluster_is_recorded_when_depth_runs_out(K3):
    f = planted(K3, [K3.one(), ser("1 + T^5", K3)])
    shallow = roots_in(f, depth=0)
    assert len(shallow) == 1 and not shallow[0].resolved and shallow[0].multiplicity == 2
    deep = roots_in(f)
    assert values(deep) == ["1", "1 + T^5"] and all(r.exact for r in deep)


@given(st.sampled_from([2, 3, 4]), st.data())
def test_planted_roots_are_found_exactly(q, data):
    K = series_field(field_of_size(q))
    n = data.draw(st.integers(1, 5))
    roots = set()
    for _ in range(n):
        lead = data.draw(st.integers(-2, 3))
        cs = [data.draw(st.integers(1, q - 1))] + data.draw(st.lists(st.integers(0, q - 1), max_size=3))
        roots.add(LaurentSeries.make(K, lead, cs))
    f = planted(K, sorted(roots, key=str))
    recs = roots_in(f, prec=12)
    assert {r.value for r in recs} == roots
    assert all(r.exact and r.multiplicity == 1 for r in recs)


@given(st.sampled_from([2, 3, 4]), st.integers(0, 10 ** 9), st.integers(1, 4))
def test_roots_really_vanish(q, seed, k):
    K = series_field(field_of_size(q))
    f = random_sparse(random.Random(seed), K, k, 20)
    for r in roots_in(f, prec=10):
        fz = evaluate(f, r.value)
        if r.exact:
            assert fz.is_zero()
        else:
            base = min(a.order + n * r.value.order for n, a in f.terms)
            assert fz.lower_order() >= base + (r.certified_prec - r.value.order)
    assert len(roots_in(f, prec=10)) <= q ** k


@given(st.integers(0, 10 ** 9), st.integers(1, 3))
def test_agrees_with_oracle(seed, k):
    K = series_field(field_of_size(2))
    f = random_sparse(random.Random(seed), K, k, 12)
    ok, detail = oracle_check(f, roots_in(f, prec=16), 6, (-3, 4))
    assert ok, detail


def test_double_root_in_k_is_an_unresolved_cluster(K2):
    # (1+T^2) x^3 + T^6 x = x ((1+T) x + T^3)^2: a double root T^3/(1+T) in K
    f = parse_poly("(1 + T^2)*x^3 + T^6*x", K2)
    recs = roots_in(f)
    (c,) = [r for r in recs if not r.resolved]
    assert c.multiplicity == 2 and c.value.order == 3
    assert (c.value * ser("1 + T", K2)).truncate(c.value.prec) == ser("T^3", K2).truncate(c.value.prec)
    ok, detail = oracle_check(f, recs, 6, (-3, 4))
    assert ok and detail["clusters"] == 1


def test_oracle_examples(e1, K2):
    got = oracle_roots(e1, 6, (0, 2))
    assert sorted(map(str, got)) == ["0", "1 + O(T^6)", "1 + T + O(T^6)", "T + O(T^7)"]
    assert sorted(map(str, oracle_roots(parse_poly("x + 1", K2), 4, (-2, 2)))) == ["1 + O(T^4)"]
    assert oracle_roots(parse_poly("x^2 + T", K2), 5, (-3, 3)) == set()


def test_bare_oracle_criterion_admits_cluster_points(e1):
    bare = oracle_roots(e1, 6, (0, 2), confirm_depth=0)
    confirmed = oracle_roots(e1, 6, (0, 2))
    assert confirmed < bare


def test_oracle_cap(e1, monkeypatch):
    monkeypatch.setenv("SPARSEZEROS_MAX_ENUM", "100")
    with pytest.raises(CapExceeded):
        oracle_roots(e1, 8, (-3, 4))


def test_lattice_is_tame():
    F2 = field_of_size(2)
    assert lattice(F2, 3) == [(1, 1), (2, 1), (3, 1), (1, 3)]
    assert (1, 2) in lattice(field_of_size(3), 2)


def test_degree_two_search(K2):
    recs = roots_deg_le_d(parse_poly("x^4 + x", K2), 2)
    assert len(recs) == 4
    assert sorted(r.degree_over_K for r in recs) == [1, 1, 2, 2]


def test_degree_one_matches_roots_in(e1):
    assert values(roots_deg_le_d(e1, 1)) == values(roots_in(e1))


def test_tame_ramified_root(K3):
    recs = roots_deg_le_d(parse_poly("x^2 - T", K3), 2)
    assert len(recs) == 2
    assert all(r.home == (1, 2) and r.degree_over_K == UpperBound(2) for r in recs)
    assert {str(r.value) for r in recs} == {"T^(1/2)", "2*T^(1/2)"}


def test_degree_search_has_no_duplicates(K2):
    recs = roots_deg_le_d(parse_poly("x^16 + x", K2), 4)
    assert len(recs) == 16
    assert len({(r.home, str(r.value)) for r in recs}) == 16


def test_inexact_coefficients_need_no_verify(K2):
    f = SparsePoly.make(K2, [(0, LaurentSeries.make(K2, 1, [1], 12)), (1, K2.one()), (2, K2.one())])
    with pytest.raises(PrecisionError):
        roots_in(f)
    recs = roots_in(f, verify=False, prec=6)
    assert len(recs) == 2


def test_root_record_json(e1):
    data = roots_in(e1)[1].to_json()
    assert set(data) >= {"value", "j", "e", "multiplicity", "resolved", "degree", "certified_prec"}
