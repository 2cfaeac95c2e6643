import pytest

from twistpoints.curve import CurveParams, Twist, TwistPoint
from twistpoints.descent import (
    CONGRUENT, CongruentDescentData, GeneralDescentData, all_congruent_tuples,
    all_general_tuples, compose_congruent, compose_general, decompose_congruent,
    decompose_general, recompose, uniqueness_audit,
)
from twistpoints.errors import DomainError, ValidationError

T5 = Twist(CONGRUENT, 5)
P5 = TwistPoint(-20, 6, 25)


def test_general_d5():
    g = decompose_general(T5, P5)
    assert g == GeneralDescentData(1, 5, 1, -4, 6)
    assert compose_general(CONGRUENT, g) == (T5, P5)
    # -P has the same data (y >= 1 representative)
    assert decompose_general(T5, TwistPoint(-20, -6, 25)) == g


def test_general_integral_points():
    t = Twist(CONGRUENT, 1)
    # 6 = 8 - 2 puts (2:1:1) on d = 6, and z = 1 forces d1 = b1 = 1
    t6 = Twist(CONGRUENT, 6)
    assert decompose_general(t6, TwistPoint(2, 1, 1)) == GeneralDescentData(6, 1, 1, 2, 1)
    assert compose_general(CONGRUENT, GeneralDescentData(6, 1, 1, 2, 1)) == (t6, TwistPoint(2, 1, 1))
    with pytest.raises(DomainError):
        decompose_general(t, TwistPoint(1, 0, 1))


def test_general_b1_one():
    # z = d1^2 exactly gives b1 = 1; z = 8 is a pure cube
    t = Twist(CONGRUENT, 5)
    assert decompose_general(t, P5).b1 == 1
    g = decompose_general(t, TwistPoint(10, 3, 8))
    assert (g.d1, g.b1) == (1, 2)


def test_compose_general_rejects():
    with pytest.raises(ValidationError):
        compose_general(CONGRUENT, GeneralDescentData(2, 2, 1, 1, 1))
    with pytest.raises(ValidationError):
        compose_general(CONGRUENT, GeneralDescentData(1, 5, 1, -4, 7))


def test_congruent_d5():
    c = decompose_congruent(T5, P5)
    assert (c.nu, c.d1, c.d2, c.d3, c.d4, c.b1, c.b2, c.b3, c.b4) == (-1, 5, 1, 1, 1, 1, 2, 3, 1)
    assert c.e == 1 and c.y == 6 and c.d == 5
    # the two linear relations, checked by hand
    assert c.d2 * c.b2**2 - c.nu * c.d1 * c.b1**2 == c.d3 * c.b3**2
    assert c.nu * c.d2 * c.b2**2 + c.d1 * c.b1**2 == c.d4 * c.b4**2
    assert compose_congruent(c) == (T5, P5)


def test_congruent_small_example():
    data = CongruentDescentData(1, 1, 2, 1, 3, 1, 1, 1, 1)
    assert compose_congruent(data) == (Twist(CONGRUENT, 6), TwistPoint(2, 1, 1))


def test_congruent_sign_follows_x():
    t = Twist(CONGRUENT, 5)
    assert decompose_congruent(t, TwistPoint(9, 12, 1)).nu == 1


def test_congruent_factor_two_case():
    # x1 = 7, d1 b1^2 = 1: x1 - 1 = 6 and x1 + 1 = 8 both carry odd powers of 2
    t = Twist(CONGRUENT, 21)
    P = TwistPoint(7, 4, 1)
    c = decompose_congruent(t, P)
    assert c.e == 2
    assert (c.d1, c.d2, c.d3, c.d4, c.b1, c.b2, c.b3, c.b4) == (1, 7, 3, 1, 1, 1, 1, 2)
    assert compose_congruent(c) == (t, P)
    assert all_congruent_tuples(21, P) == [c]


def test_congruent_rejects():
    with pytest.raises(ValidationError):
        decompose_congruent(Twist(CONGRUENT, 6), TwistPoint(12, 3, 2))
    with pytest.raises(ValidationError):
        compose_congruent(CongruentDescentData(1, 2, 2, 1, 3, 1, 1, 1, 1))
    with pytest.raises(DomainError):
        decompose_congruent(Twist(CurveParams(2, 3), 3), TwistPoint(1, 1, 1))


def test_all_tuples_unique():
    assert all_general_tuples(CONGRUENT, 5, P5) == [decompose_general(T5, P5)]


def test_audit_examples():
    assert uniqueness_audit(CONGRUENT, 1).ok
    rep = uniqueness_audit(CONGRUENT, 30)
    assert rep.ok and rep.points_checked > 0 and rep.congruent_points_checked == rep.points_checked
    rep = uniqueness_audit(CurveParams(2, 3), 50)
    assert rep.ok and rep.points_checked > 0


def test_audit_sampling_is_seeded():
    a = uniqueness_audit(CONGRUENT, 25, sample=0.5, seed=7)
    b = uniqueness_audit(CONGRUENT, 25, sample=0.5, seed=7)
    assert a.to_json() == b.to_json()
    assert a.points_checked < uniqueness_audit(CONGRUENT, 25).points_checked
    with pytest.raises(ValidationError):
        uniqueness_audit(CONGRUENT, 5, sample=0)


def test_recompose():
    assert recompose(CONGRUENT, 5, P5) == P5
