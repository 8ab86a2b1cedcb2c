import pytest
from hypothesis import given, strategies as st

from sparsezeros.errors import CapExceeded, FieldError
from sparsezeros.extremal import (
    SubspaceSpec,
    span,
    subspace_coefficients,
    subspace_poly,
    verify_sharpness_thm1,
    verify_sharpness_thm2,
    verify_xe_variant,
)
from sparsezeros.fields import field_of_size, fq_make
from sparsezeros.laurent import LaurentSeries, series_field
from sparsezeros.parser import parse_poly, parse_series
from sparsezeros.poly import evaluate

from conftest import E1
from oracles import product_poly


def spec(q, basis, Fm=None, c=None):
    K = series_field(field_of_size(q))
    F = fq_make(K.base.p, Fm) if Fm else K.base
    amb = series_field(K.base, F.m // K.base.m)
    return SubspaceSpec(K, F, tuple(parse_series(b, amb) for b in basis), parse_series(c, amb) if c else None)


def test_basis_one(K2):
    assert subspace_poly(spec(2, ["1"])) == parse_poly("x^2 + x", K2)


def test_e1_is_a_subspace_polynomial(K2):
    assert subspace_poly(spec(2, ["1", "T"])) == parse_poly(E1, K2)


@pytest.mark.parametrize(
    "q,basis,Fm", [(2, ["1", "T"], None), (3, ["1", "T^-1"], None), (4, ["g", "T"], None), (2, ["1", "T"], 2)]
)
def test_recursion_matches_direct_product(q, basis, Fm):
    s = spec(q, basis, Fm)
    amb = s.ambient
    dense = product_poly(span(s), amb.one(), amb.zero())
    coeffs = subspace_coefficients(s)
    Q = s.label_field.q
    want = {n: c for n, c in enumerate(dense) if not c.is_zero()}
    assert want == {Q ** i: a for i, a in enumerate(coeffs)}


def test_f4_span_support(K2):
    f = subspace_poly(spec(2, ["1", "T"], 2))
    assert f.field == K2
    assert f.exponents == [1, 4, 16] and f.k == 2


def test_dependent_basis_is_rejected():
    with pytest.raises(FieldError):
        subspace_poly(spec(3, ["1", "2"]))


def test_degree_cap(monkeypatch):
    monkeypatch.setenv("SPARSEZEROS_MAX_ENUM", "8")
    with pytest.raises(CapExceeded):
        subspace_poly(spec(2, ["1", "T", "T^2", "T^3"]))


@pytest.mark.parametrize("q,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (4, 3)])
def test_root_bound_sharpness(q, k):
    rep = verify_sharpness_thm1(spec(q, ["1", "T", "T^-2"][:k]))
    assert rep["passed"] and rep["count"] == q ** k and rep["all_exact"] and rep["equals_subspace"]


def test_constant_factor_keeps_roots():
    rep = verify_sharpness_thm1(spec(3, ["1", "T"], c="T^2 + 2"))
    assert rep["passed"] and rep["count"] == 9


def test_degree_bound_q2():
    rep = verify_sharpness_thm2(spec(2, ["1", "T"], 2), 2)
    assert rep["per_degree"] == [4, 12] and rep["count"] == 16 and rep["passed"]


def test_degree_bound_q3():
    rep = verify_sharpness_thm2(spec(3, ["1"], 2), 2)
    assert rep["poly"] == "x^9 + 2*x"
    assert rep["per_degree"] == [3, 6] and rep["passed"]


def test_degree_bound_d1_is_root_bound():
    rep = verify_sharpness_thm2(spec(2, ["1", "T"]), 1)
    assert rep["count"] == 4 and rep["passed"]


def test_degree_bound_needs_big_enough_label_field():
    with pytest.raises(FieldError):
        verify_sharpness_thm2(spec(2, ["1", "T"]), 2)


def test_xe_variant():
    assert verify_xe_variant(spec(2, ["1"]), 1)["count"] == 2
    rep = verify_xe_variant(spec(2, ["1", "T^2"]), 2, oracle=True)
    assert rep["status"] == "APPLICABLE" and rep["count"] == 4 and rep["oracle_agrees"]


def test_xe_not_applicable_is_flagged():
    rep = verify_xe_variant(spec(3, ["1", "T"]), 2)
    assert rep["status"] == "NOT_APPLICABLE"


@given(st.sampled_from([2, 3, 4]), st.data())
def test_subspace_polynomial_is_additive_and_linear(q, data):
    s = spec(q, ["1", "T", "T^-1"][: data.draw(st.integers(1, 3))])
    f = subspace_poly(s)
    K = f.field

    def draw():
        lead = data.draw(st.integers(-2, 2))
        return LaurentSeries.make(K, lead, [data.draw(st.integers(1, q - 1)), data.draw(st.integers(0, q - 1))])

    x, y = draw(), draw()
    lam = data.draw(st.integers(0, q - 1))
    assert evaluate(f, x + y) == evaluate(f, x) + evaluate(f, y)
    assert evaluate(f, x.scale(lam)) == evaluate(f, x).scale(lam)
    for v in span(s):
        assert evaluate(f, v).is_zero()
