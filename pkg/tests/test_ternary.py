import random

import pytest

from twistpoints.errors import ResourceError, ValidationError
from twistpoints.ternary import (
    BoxBounds, TernaryForm, bound_value, count_solutions, exponent_scan, scale_list,
)

import oracles


def _count(f, box, **kw):
    return count_solutions(TernaryForm(*f), box, **kw)


def test_validation():
    with pytest.raises(ValidationError):
        TernaryForm(0, 1, 1)
    with pytest.raises(ValidationError):
        TernaryForm(2, 4, 1)
    with pytest.raises(ValidationError):
        BoxBounds(1, 1, 0.5, 1, 1, 1)


def test_small_boxes():
    box = BoxBounds(1, 1, 2, 1, 1, 1)
    assert _count((1, 1, 1), box) == oracles.ternary_count((1, 1, 1), box.U, box.V)
    # u = (1, 1, -2) and (-1, -1, 2), each with 8 sign choices of v
    assert _count((1, 1, 1), box) == 16
    assert _count((1, 1, 1), BoxBounds(1, 1, 1, 1, 1, 1)) == 0


def test_random_forms_against_oracle():
    rng = random.Random(11)
    done = 0
    while done < 12:
        f = tuple(rng.choice([-1, 1]) * rng.randint(1, 7) for _ in range(3))
        try:
            TernaryForm(*f)
        except ValidationError:
            continue
        box = BoxBounds(*(rng.randint(1, 5) for _ in range(6)))
        assert _count(f, box) == oracles.ternary_count(f, box.U, box.V), (f, box)
        done += 1


def test_symmetries():
    f, box = (1, 2, -3), BoxBounds(5, 4, 6, 3, 2, 4)
    base = _count(f, box)
    assert base > 0
    assert _count((2, 1, -3), BoxBounds(4, 5, 6, 2, 3, 4)) == base
    assert _count((-3, 2, 1), BoxBounds(6, 4, 5, 4, 2, 3)) == base
    assert _count((-1, 2, -3), box) == base
    assert _count((1, -2, 3), box) == base


def test_predicate_containment():
    f, box = (1, -1, -1), BoxBounds(6, 6, 6, 4, 4, 4)
    total = _count(f, box)
    assert _count(f, box, predicate=lambda u, v: True) == total
    positive = _count(f, box, predicate=lambda u, v: min(u) > 0 and min(v) > 0)
    assert 0 < positive <= total


def test_workers_and_budget():
    f, box = (1, 1, -1), BoxBounds.cube(8, 8)
    assert _count(f, box, workers=3) == _count(f, box)
    with pytest.raises(ResourceError):
        _count(f, BoxBounds.cube(100, 100), budget=10**6)


def test_bound_value():
    f = TernaryForm(1, 1, 1)
    assert bound_value(f, BoxBounds(1, 1, 1, 1, 1, 1), 0.01) == 1
    assert bound_value(f, BoxBounds(2, 2, 2, 1, 1, 1), 0) == pytest.approx(4)
    assert bound_value(f, BoxBounds(4, 4, 4, 8, 8, 8), 0) == pytest.approx(128)


def test_scan():
    rep = exponent_scan(TernaryForm(1, 1, -1), [4])
    assert len(rep.rows) == 1
    assert scale_list(2, 32) == [2, 4, 8, 16, 32]
    rep = exponent_scan(TernaryForm(1, -1, 1), scale_list(2, 16), fixed_V=1)
    # V fixed at 1: count stays below a constant times (U1 U2 U3)^(2/3 + eps)
    assert rep.rows[-1].ratio <= rep.rows[0].ratio
    assert rep.ratio_slope() < 0.05
    text = rep.to_csv(["x"])
    assert text.splitlines()[1] == "scale,U1,U2,U3,V1,V2,V3,count,bound,ratio"
