import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from poisson_k.polynomial import (
    LambdaPolynomial,
    parse_rational,
    poly_add,
    poly_eval,
    poly_mul,
    poly_scale,
)

P = LambdaPolynomial.from_coeffs
LAM = P([0, 1])

rationals = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 20))
polys = st.lists(rationals, max_size=9).map(P)


def test_add():
    assert poly_add(LAM, P([0, 0, 1])) == P([0, 1, 1])
    p = P([1, 2, 3])
    assert poly_add(p, LambdaPolynomial.zero()) == p
    diff = poly_add(LAM, -LAM)
    assert diff.coeffs == () and diff.degree == -1


def test_mul():
    assert poly_mul(LAM, P([1, 1])) == P([0, 1, 1])
    three_lam = P([0, 3])
    assert poly_mul(three_lam, three_lam) == P([0, 0, 9])
    p = P([Fraction(1, 2), 0, 4])
    assert poly_mul(p, LambdaPolynomial.one()) == p


def test_scale():
    assert poly_scale(P([0, 1, 1]), 3) == P([0, 3, 3])
    assert poly_scale(P([0, 1, 1]), 0).is_zero()
    assert poly_scale(P([0, Fraction(1, 2)]), Fraction(2, 1)) == LAM


def test_eval():
    assert poly_eval(P([0, 1, 1]), 1) == 2
    assert poly_eval(P([0, 1, 7, 6, 1]), 1) == 15
    assert poly_eval(LambdaPolynomial.zero(), Fraction(7, 3)) == 0


def test_untrimmed_construction_rejected():
    with pytest.raises(ValueError):
        LambdaPolynomial((Fraction(1), Fraction(0)))
    assert P([1, 0, 0]).coeffs == (Fraction(1),)


def test_json_format():
    m4 = P([0, 1, 7, 6, 1])
    assert m4.to_json() == ["0/1", "1/1", "7/1", "6/1", "1/1"]
    assert LambdaPolynomial.loads(m4.dumps()) == m4
    assert json.loads(P([0, 1, Fraction(1, 2)]).dumps()) == ["0/1", "1/1", "1/2"]


def test_parse_rational_is_decimal_exact():
    assert parse_rational("0.1") == Fraction(1, 10)
    assert parse_rational("1/3") == Fraction(1, 3)
    assert parse_rational(" 2 ") == 2
    with pytest.raises(ValueError):
        parse_rational("abc")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_log_evalf_handles_huge_values():
    import math

    p = P([0, Fraction(10**400), 1])
    assert p.log_evalf(2.0) == pytest.approx(400 * math.log(10) + math.log(2), rel=1e-14)
    assert P([0, 1, 1]).log_evalf(1.0) == pytest.approx(math.log(2))


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(polys, polys, rationals)
def test_eval_is_multiplicative(a, b, x):
    assert poly_eval(poly_mul(a, b), x) == poly_eval(a, x) * poly_eval(b, x)


@given(polys)
def test_canonical_form_and_round_trip(a):
    assert not a.coeffs or a.coeffs[-1] != 0
    assert LambdaPolynomial.from_json(a.to_json()) == a
