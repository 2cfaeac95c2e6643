"""Naive and canonical heights on quadratic twists.

Normalization: ``hhat = 1/2 * h_x + O(1)``, so that ``log eta_d`` is the
minimum of ``hhat`` over non-torsion points. The canonical height is the
duplication limit ``lim 4^-n * 1/2 * h_x(2^n P)`` evaluated with exact
integers; the x-coordinate duplication formula does not depend on ``d``.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd, log
from typing import Iterable, NamedTuple, Sequence

import gmpy2
from gmpy2 import mpz

from .arith import integer_log, squarefree_split
from .curve import CurveParams, Twist, TwistPoint, is_torsion, make_point
from .errors import DomainError, ResourceError, ValidationError

DEFAULT_N_ITER = 8
DEFAULT_DIGIT_BUDGET = 1 << 26  # bits of the largest duplication coordinate


class HeightValue(NamedTuple):
    value: float
    abs_error: float = 0.0


class GapReport(NamedTuple):
    """Range of ``hhat - h_x/2`` over a sample of non-torsion points."""

    min_gap: float
    max_gap: float
    size: int

    @property
    def max_deficit(self) -> float:
        """Largest ``h_x/2 - hhat``; bounds how far below ``h_x/2`` a point can sit."""
        return max(0.0, -self.min_gap)

    @property
    def bound(self) -> float:
        return max(abs(self.min_gap), abs(self.max_gap))


def naive_height_x(P: TwistPoint) -> HeightValue:
    """Weil height of ``x/z`` in lowest terms; 0 at the point at infinity."""
    if P.is_infinity:
        return HeightValue(0.0)
    g = gcd(P.x, P.z)
    return HeightValue(log(max(abs(P.x), P.z) // g))


def _resultant(params: CurveParams) -> int:
    # gcd(numerator, denominator) of the duplication map always divides this.
    return 256 * (4 * params.A**3 + 27 * params.B**2) ** 2


def duplicate_x(params: CurveParams, a, b):
    """x(2P) as a reduced pair from x(P) = a/b, b > 0, gcd(a, b) = 1."""
    A, B = params.A, params.B
    a2, b2 = a * a, b * b
    num = a2 * a2 - 2 * A * a2 * b2 - 8 * B * a * b2 * b + A * A * b2 * b2
    den = 4 * b * (a2 * a + A * a * b2 + B * b2 * b)
    if den < 0:
        num, den = -num, -den
    R = _resultant(params)
    g = gmpy2.gcd(gmpy2.gcd(R, num % R), den % R)
    if g != 1:
        num, den = num // g, den // g
    return num, den


def _duplication_estimate(params: CurveParams, P: TwistPoint, n_iter: int, digit_budget: int) -> float:
    g = gcd(P.x, P.z)
    a, b = mpz(P.x // g), mpz(P.z // g)
    estimate = 0.5 * log(max(abs(P.x), P.z) // g)
    for n in range(1, n_iter + 1):
        a, b = duplicate_x(params, a, b)
        if b == 0:
            raise DomainError("duplication reached the point at infinity; the point is torsion")
        m = max(abs(a), b)
        if m.bit_length() > digit_budget:
            raise ResourceError(
                f"duplication coordinates exceed {digit_budget} bits at step {n}",
                partial=HeightValue(estimate, float("inf")),
            )
        estimate = 0.5 * integer_log(m) / 4**n
    return estimate


@lru_cache(maxsize=None)
def calibrate_gap(params: CurveParams, n_iter: int = 5) -> GapReport:
    """Empirical range of ``hhat - h_x/2`` for the curve, over a fixed sample.

    The gap does not depend on the twist, so the sample takes every
    non-torsion point with small ``x = p/q`` on whichever twist carries it:
    integers ``-30 <= p <= 1000`` and fractions with ``|p|, q <= 30``.
    """
    xs = {(p, 1) for p in range(-30, 1001)}
    xs |= {(p, q) for q in range(2, 31) for p in range(-30, 31) if gcd(p, q) == 1}
    gaps = []
    for p, q in sorted(xs):
        F = params.cubic(p, q)
        if F <= 0:
            continue
        d, s = squarefree_split(q * F)
        t = Twist(params, d)
        P = make_point(t, p * q, s, q * q)
        if is_torsion(t, P):
            continue
        h = _duplication_estimate(params, P, n_iter, DEFAULT_DIGIT_BUDGET)
        gaps.append(h - 0.5 * naive_height_x(P).value)
    return GapReport(min(gaps), max(gaps), len(gaps))


def tail_constant(params: CurveParams) -> float:
    """``C`` in the tail bound ``C * 4^-n``: calibrated gap bound plus one."""
    return calibrate_gap(params).bound + 1.0


def canonical_height(
    t: Twist,
    P: TwistPoint,
    n_iter: int = DEFAULT_N_ITER,
    *,
    gap_bound: float | None = None,
    digit_budget: int = DEFAULT_DIGIT_BUDGET,
) -> HeightValue:
    """Canonical height of ``P`` on the twist ``t``.

    Torsion points get exactly ``HeightValue(0.0, 0.0)``. Otherwise the
    value is ``1/2 * h_x(2^n P) / 4^n`` and ``abs_error`` is ``C / 4^n`` with
    ``C = gap_bound`` (default: calibrated gap bound plus one).

    Raises ``ResourceError`` (carrying the partial estimate) when the
    duplication coordinates outgrow ``digit_budget`` bits.
    """
    if n_iter < 1:
        raise DomainError("n_iter must be positive")
    if not t.contains(P.x, P.y, P.z):
        raise ValidationError(f"{P} is not on the twist d = {t.d}")
    if is_torsion(t, P):
        return HeightValue(0.0, 0.0)
    C = tail_constant(t.params) if gap_bound is None else gap_bound
    value = _duplication_estimate(t.params, P, n_iter, digit_budget)
    return HeightValue(value, C / 4**n_iter)


def height_gap_scan(
    twists: Sequence[Twist],
    points: Sequence[Iterable[TwistPoint]],
    n_iter: int = DEFAULT_N_ITER,
) -> GapReport:
    """Min and max of ``hhat - h_x/2`` over ``points[i]`` on ``twists[i]``."""
    if len(twists) != len(points):
        raise DomainError("need one point list per twist")
    gaps = []
    for t, pts in zip(twists, points):
        for P in pts:
            if is_torsion(t, P):
                raise DomainError(f"torsion point {P} on d = {t.d} in gap sample")
            h = canonical_height(t, P, n_iter, gap_bound=0.0).value
            gaps.append(h - 0.5 * naive_height_x(P).value)
    if not gaps:
        raise DomainError("empty sample")
    return GapReport(min(gaps), max(gaps), len(gaps))

