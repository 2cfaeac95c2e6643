from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twistpoints.curve import (
    INFINITY, STANDARD_INFINITY, CurveParams, StandardPoint, Twist, TwistPoint, add,
    descent_representative, from_standard, is_torsion, make_point, mul, negate,
    on_standard, to_standard,
)
from twistpoints.errors import ValidationError

import oracles

E = CurveParams(-1, 0)
T5 = Twist(E, 5)
P5 = TwistPoint(-20, 6, 25)


def test_params_validation():
    with pytest.raises(ValidationError):
        CurveParams(0, 0)
    with pytest.raises(ValidationError):
        CurveParams(-3, 2)
    assert E.discriminant == 64
    assert E.cubic(2) == 6


def test_twist_validation():
    for bad in (0, -5, 4, 12):
        with pytest.raises(ValidationError):
            Twist(E, bad)


def test_make_point():
    assert make_point(T5, -40, 12, 50) == P5
    assert make_point(T5, 20, -6, -25) == P5
    assert make_point(T5, 20, 6, -25) == TwistPoint(-20, -6, 25)
    assert make_point(T5, 20, 6, -25, positive_y=True) == P5
    assert make_point(T5, 0, 1, 0) == INFINITY
    with pytest.raises(ValidationError):
        make_point(T5, 1, 1, 1)
    with pytest.raises(ValidationError):
        make_point(T5, 0, 0, 0)


def test_standard_round_trip():
    S = to_standard(T5, P5)
    assert S == StandardPoint(Fraction(-4), Fraction(6))
    assert on_standard(T5, S)
    assert from_standard(T5, S) == P5
    assert from_standard(T5, STANDARD_INFINITY) == INFINITY


def test_group_law_on_d5():
    S = to_standard(T5, P5)
    D = add(T5, S, S)
    assert on_standard(T5, D)
    assert D.X == Fraction(1681, 144)
    assert mul(T5, 3, S) == add(T5, D, S)
    assert add(T5, S, negate(S)) == STANDARD_INFINITY
    assert mul(T5, -2, S) == negate(D)
    assert mul(T5, 0, S) == STANDARD_INFINITY


def test_torsion():
    t = Twist(E, 1)
    for x, y, z in [(0, 0, 1), (1, 0, 1), (-1, 0, 1), (0, 1, 0)]:
        assert is_torsion(t, TwistPoint(x, y, z))
    assert not is_torsion(T5, P5)
    # y^2 = x^3 + 1 has the 6-torsion point (2, 3)
    t = Twist(CurveParams(0, 1), 1)
    assert is_torsion(t, TwistPoint(2, 3, 1))
    assert is_torsion(t, TwistPoint(0, 1, 1))


def test_descent_representative():
    assert descent_representative(TwistPoint(-20, -6, 25)) == P5
    assert descent_representative(P5) == P5


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6))
def test_group_law_associative(i, j, k):
    S = to_standard(T5, P5)
    a, b, c = mul(T5, i, S), mul(T5, -j, S), mul(T5, k, S)
    assert add(T5, add(T5, a, b), c) == add(T5, a, add(T5, b, c))
    assert on_standard(T5, add(T5, a, b))


def test_torsion_matches_oracle():
    for (A, B) in [(-1, 0), (0, 1), (2, 3), (0, -2), (-2, 1)]:
        params = CurveParams(A, B)
        for z in (1, 4, 9):
            for x in range(-12, 13):
                rhs = params.cubic(x, z)
                if rhs <= 0:
                    continue
                s, q = oracles.squarefree_split(rhs * z)
                P = make_point(Twist(params, s), x * z, q, z * z)
                assert is_torsion(Twist(params, s), P) == oracles.is_torsion(A, B, s, P.x, P.y, P.z)
