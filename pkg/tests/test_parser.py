import random

import pytest
from hypothesis import given, strategies as st

from sparsezeros.census import random_sparse
from sparsezeros.errors import ParseError
from sparsezeros.fields import field_of_size
from sparsezeros.parser import format_poly, parse_poly, parse_series
from sparsezeros.laurent import series_field
from sparsezeros.poly import SparsePoly

from conftest import E1


def test_e1_parses(K2):
    f = parse_poly(E1, K2)
    assert f.k == 2
    assert f.exponents == [1, 2, 4]
    assert str(f) == "x^4 + (1 + T + T^2)*x^2 + (T + T^2)*x"


def test_subtraction_reduces_mod_p(K3):
    assert str(parse_poly("x^2 - x", K3)) == "x^2 + 2*x"


def test_cancellation_to_zero_is_an_error(K2):
    with pytest.raises(ParseError, match="zero polynomial"):
        parse_poly("x + x", K2)


def test_generator_and_products(K4):
    f = parse_poly("g^2*T^-1*x^3 + 2*g*x + (1 + g*T)", K4)
    assert f.k == 1  # 2 = 0 in characteristic 2 kills the middle term
    F = K4.residue
    assert f.terms[-1][1].coeffs == (F.mul(F.gen(), F.gen()),)


def test_leading_sign_and_spaces(K3):
    f = parse_poly("  - x^2 +  (-T + 1) ", K3)
    assert str(f) == "2*x^2 + (1 + 2*T)"


def test_parse_series(K2):
    s = parse_series("(1 + T^-2)", K2)
    assert s.lead == -2 and str(s) == "T^-2 + 1"


@pytest.mark.parametrize(
    "src,col",
    [("x^", 3), ("x +* x", 4), ("x^2 + $", 7), ("(1 + T", 7), ("x^2 x", 5), ("T^", 3)],
)
def test_error_positions(K2, src, col):
    with pytest.raises(ParseError) as exc:
        parse_poly(src, K2)
    assert exc.value.col == col
    assert f"column {col}" in str(exc.value)


def test_multiline_error_line(K2):
    with pytest.raises(ParseError) as exc:
        parse_poly("x^2 +\n  x^", K2)
    assert exc.value.line == 2


def test_exponent_overflow(K2):
    with pytest.raises(ParseError, match="overflow"):
        parse_poly("x^99999999999999999999999", K2)


def test_huge_sparse_exponent_is_fine(K2):
    assert parse_poly("x^1000000007 + 1", K2).degree == 1000000007


@given(st.sampled_from([2, 3, 4, 5, 9]), st.integers(0, 10 ** 9), st.integers(1, 5))
def test_format_parse_round_trip(q, seed, k):
    K = series_field(field_of_size(q))
    f = random_sparse(random.Random(seed), K, k, 40)
    assert parse_poly(format_poly(f), K) == f


def test_from_text_round_trip_via_json(K3):
    f = parse_poly("x^5 + 2*T^-3*x + 1", K3)
    assert SparsePoly.from_json(f.to_json()) == f
