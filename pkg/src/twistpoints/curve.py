"""Quadratic twists ``d*y^2*z = x^3 + A*x*z^2 + B*z^3`` and their group law.

Points live in two models:

* ``TwistPoint`` -- primitive projective integer triple on the twist itself;
* ``StandardPoint`` -- exact rational point on ``Y^2 = X^3 + A d^2 X + B d^3``
  via ``(X, Y) = (d x/z, d^2 y/z)``, where the chord-tangent law is run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .arith import is_squarefree
from .errors import ValidationError

# Mazur: a rational torsion point has order at most 12.
MAX_TORSION_ORDER = 12


@dataclass(frozen=True, order=True)
class CurveParams:
    A: int
    B: int

    def __post_init__(self):
        if 4 * self.A**3 + 27 * self.B**2 == 0:
            raise ValidationError(f"singular curve: 4A^3 + 27B^2 = 0 for (A, B) = ({self.A}, {self.B})")

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.A**3 + 27 * self.B**2)

    def cubic(self, x: int, z: int = 1) -> int:
        """Homogeneous right-hand side ``x^3 + A x z^2 + B z^3``."""
        return x**3 + self.A * x * z * z + self.B * z**3


@dataclass(frozen=True, order=True)
class Twist:
    params: CurveParams
    d: int

    def __post_init__(self):
        if self.d < 1 or not is_squarefree(self.d):
            raise ValidationError(f"twist parameter d = {self.d} must be a positive squarefree integer")

    def contains(self, x: int, y: int, z: int) -> bool:
        return self.d * y * y * z == self.params.cubic(x, z)


@dataclass(frozen=True, order=True)
class TwistPoint:
    x: int
    y: int
    z: int

    @property
    def is_infinity(self) -> bool:
        return self.z == 0

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)


INFINITY = TwistPoint(0, 1, 0)


@dataclass(frozen=True)
class StandardPoint:
    X: Fraction = Fraction(0)
    Y: Fraction = Fraction(0)
    at_infinity: bool = False


STANDARD_INFINITY = StandardPoint(at_infinity=True)


def make_point(t: Twist, x: int, y: int, z: int, *, positive_y: bool = False) -> TwistPoint:
    """Validate ``(x:y:z)`` on ``t`` and return its normalized primitive representative.

    With ``positive_y`` the representative of ``-P`` is returned when ``y < 0``
    (the convention the descent parametrizations use).
    """
    if (x, y, z) == (0, 0, 0):
        raise ValidationError("(0, 0, 0) is not a projective point")
    if not t.contains(x, y, z):
        raise ValidationError(f"({x}:{y}:{z}) is not on d*y^2*z = x^3 + A*x*z^2 + B*z^3 with d = {t.d}")
    if z == 0:
        return INFINITY
    g = gcd(gcd(x, y), z)
    x, y, z = x // g, y // g, z // g
    if z < 0:
        x, y, z = -x, -y, -z
    if positive_y and y < 0:
        y = -y
    return TwistPoint(x, y, z)


def descent_representative(P: TwistPoint) -> TwistPoint:
    """``P`` or ``-P``, whichever has ``y >= 0``."""
    if P.is_infinity or P.y >= 0:
        return P
    return TwistPoint(P.x, -P.y, P.z)


def standard_coefficients(t: Twist) -> tuple[int, int]:
    return t.params.A * t.d**2, t.params.B * t.d**3


def to_standard(t: Twist, P: TwistPoint) -> StandardPoint:
    if P.is_infinity:
        return STANDARD_INFINITY
    return StandardPoint(Fraction(t.d * P.x, P.z), Fraction(t.d**2 * P.y, P.z))


def from_standard(t: Twist, S: StandardPoint) -> TwistPoint:
    """Inverse of :func:`to_standard`: ``(X/d : Y/d^2 : 1)`` scaled to a primitive triple."""
    if S.at_infinity:
        return INFINITY
    x, y = S.X / t.d, S.Y / t.d**2
    den = lcm(x.denominator, y.denominator)
    return make_point(t, x.numerator * (den // x.denominator), y.numerator * (den // y.denominator), den)


def on_standard(t: Twist, S: StandardPoint) -> bool:
    if S.at_infinity:
        return True
    a, b = standard_coefficients(t)
    return S.Y**2 == S.X**3 + a * S.X + b


def negate(P: StandardPoint) -> StandardPoint:
    if P.at_infinity:
        return P
    return StandardPoint(P.X, -P.Y)


def add(t: Twist, P: StandardPoint, Q: StandardPoint) -> StandardPoint:
    if P.at_infinity:
        return Q
    if Q.at_infinity:
        return P
    a, _ = standard_coefficients(t)
    if P.X == Q.X:
        if P.Y != Q.Y or P.Y == 0:
            return STANDARD_INFINITY
        slope = (3 * P.X**2 + a) / (2 * P.Y)
    else:
        slope = (Q.Y - P.Y) / (Q.X - P.X)
    X = slope**2 - P.X - Q.X
    return StandardPoint(X, slope * (P.X - X) - P.Y)


def mul(t: Twist, n: int, P: StandardPoint) -> StandardPoint:
    if n < 0:
        return mul(t, -n, negate(P))
    result, base = STANDARD_INFINITY, P
    while n:
        if n & 1:
            result = add(t, result, base)
        base = add(t, base, base)
        n >>= 1
    return result


def is_torsion(t: Twist, P: TwistPoint) -> bool:
    """Exact test: ``n*P = O`` for some ``1 <= n <= 12``."""
    if P.is_infinity or P.y == 0:
        return True
    S = to_standard(t, P)
    if S.X.denominator != 1:
        return False
    Q = S
    for _ in range(2, MAX_TORSION_ORDER + 1):
        Q = add(t, Q, S)
        if Q.at_infinity:
            return True
        # integrality of torsion on the integral model (Nagell-Lutz)
        if Q.X.denominator != 1:
            return False
    return False
