"""Descent parametrizations of points on quadratic twists.

General curves: a primitive point ``(x:y:z)`` with ``y, z >= 1`` on
``d y^2 z = x^3 + A x z^2 + B z^3`` is written uniquely as
``x = d1 b1 x1``, ``z = d1^2 b1^3``, ``d = d0 d1`` with
``d0 y^2 = x1^3 + A x1 d1^2 b1^4 + B d1^3 b1^6``.

Congruent curve ``(A, B) = (-1, 0)``: the complete 2-descent splits the three
factors ``x1, x1 - d1 b1^2, x1 + d1 b1^2`` into squarefree times square.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from math import gcd, isqrt

from .arith import divisors, is_square, is_squarefree, squarefree_split
from .curve import CurveParams, Twist, TwistPoint, make_point
from .errors import DomainError, ValidationError

CONGRUENT = CurveParams(-1, 0)


class ConsistencyError(AssertionError):
    """An intermediate identity of the descent failed; indicates a bug."""


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise ConsistencyError(what)


@dataclass(frozen=True)
class GeneralDescentData:
    d0: int
    d1: int
    b1: int
    x1: int
    y: int

    def violations(self, params: CurveParams) -> list[str]:
        bad = []
        if min(self.d0, self.d1, self.b1, self.y) < 1:
            bad.append("d0, d1, b1, y must be positive")
            return bad
        if not is_squarefree(self.d0 * self.d1):
            bad.append(f"d0*d1 = {self.d0 * self.d1} is not squarefree")
        if gcd(self.x1, self.d1 * self.b1) != 1:
            bad.append(f"gcd(x1, d1*b1) = {gcd(self.x1, self.d1 * self.b1)} != 1")
        if self.d0 * self.y**2 != descent_cubic(params, self.d1, self.b1, self.x1):
            bad.append("d0*y^2 != x1^3 + A x1 d1^2 b1^4 + B d1^3 b1^6")
        return bad


@dataclass(frozen=True)
class CongruentDescentData:
    """Complete 2-descent tuple.

    ``e`` is the common factor of ``x1 - nu d1 b1^2`` and ``x1 + d1 b1^2``
    that survives when both have odd 2-adic valuation (then ``e = 2``);
    otherwise ``e = 1`` and the system reduces to
    ``d2 b2^2 - nu d1 b1^2 = d3 b3^2``, ``nu d2 b2^2 + d1 b1^2 = d4 b4^2``.
    """

    nu: int
    d1: int
    d2: int
    d3: int
    d4: int
    b1: int
    b2: int
    b3: int
    b4: int
    e: int = 1

    @property
    def d(self) -> int:
        return self.d1 * self.d2 * self.d3 * self.d4

    @property
    def y(self) -> int:
        return self.e * self.b2 * self.b3 * self.b4

    def violations(self) -> list[str]:
        bad = []
        if self.nu not in (-1, 1):
            bad.append("nu must be -1 or +1")
        if self.e not in (1, 2):
            bad.append("e must be 1 or 2")
        if min(self.d1, self.d2, self.d3, self.d4, self.b1, self.b2, self.b3, self.b4) < 1:
            bad.append("all d_i, b_i must be positive")
            return bad
        if not is_squarefree(self.d):
            bad.append(f"d1*d2*d3*d4 = {self.d} is not squarefree")
        if gcd(self.d1 * self.b1, self.d2 * self.b2) != 1:
            bad.append("gcd(d1*b1, d2*b2) != 1")
        if self.e == 2 and (self.d3 * self.d4) % 2 == 0:
            bad.append("e = 2 requires d3, d4 odd")
        u, w = self.d1 * self.b1**2, self.d2 * self.b2**2
        if w - self.nu * u != self.e * self.d3 * self.b3**2:
            bad.append("d2 b2^2 - nu d1 b1^2 != e d3 b3^2")
        if self.nu * w + u != self.e * self.d4 * self.b4**2:
            bad.append("nu d2 b2^2 + d1 b1^2 != e d4 b4^2")
        return bad


def descent_cubic(params: CurveParams, d1: int, b1: int, x1: int) -> int:
    """``x1^3 + A x1 d1^2 b1^4 + B d1^3 b1^6``."""
    w = d1 * b1 * b1
    return x1**3 + params.A * x1 * w * w + params.B * w**3


def _descent_point(t: Twist, P: TwistPoint) -> TwistPoint:
    if P.is_infinity:
        raise DomainError("the point at infinity has no descent data")
    if not t.contains(P.x, P.y, P.z):
        raise ValidationError(f"{P} is not on the twist d = {t.d}")
    if P.y == 0:
        raise DomainError("points with y = 0 are 2-torsion and have no descent data")
    if P.z < 1 or gcd(gcd(P.x, P.y), P.z) != 1:
        raise ValidationError(f"{P} is not a normalized primitive point")
    return P if P.y > 0 else TwistPoint(P.x, -P.y, P.z)


def decompose_general(t: Twist, P: TwistPoint) -> GeneralDescentData:
    """The unique ``(d0, d1, b1, x1, y)`` of the point (``y >= 1`` representative)."""
    P = _descent_point(t, P)
    x, y, z = P.x, P.y, P.z
    d1 = gcd(t.d, z)
    d0, z0 = t.d // d1, z // d1
    _require(x % d1 == 0, "d1 | x")
    x0 = x // d1
    _require(z0 % d1 == 0, "d1 | z0")
    z1 = z0 // d1
    b1 = gcd(x0, z1)
    _require(z1 == b1**3, "z1 = b1^3")
    data = GeneralDescentData(d0, d1, b1, x0 // b1, y)
    bad = data.violations(t.params)
    _require(not bad, "; ".join(bad))
    return data


def compose_general(params: CurveParams, data: GeneralDescentData) -> tuple[Twist, TwistPoint]:
    bad = data.violations(params)
    if bad:
        raise ValidationError("invalid general descent data: " + "; ".join(bad))
    t = Twist(params, data.d0 * data.d1)
    x = data.d1 * data.b1 * data.x1
    z = data.d1**2 * data.b1**3
    P = TwistPoint(x, data.y, z)
    _require(t.contains(x, data.y, z), "recomposed point on curve")
    _require(gcd(gcd(x, data.y), z) == 1, "recomposed point primitive")
    return t, P


def decompose_congruent(t: Twist, P: TwistPoint) -> CongruentDescentData:
    """Complete 2-descent data for a point on ``d y^2 = x^3 - x``."""
    if t.params != CONGRUENT:
        raise DomainError("complete 2-descent is implemented for (A, B) = (-1, 0) only")
    P = _descent_point(t, P)
    if P.x == 0:
        raise DomainError("x = 0 is 2-torsion")
    g = decompose_general(t, P)
    nu = 1 if g.x1 > 0 else -1
    u = g.d1 * g.b1**2
    lo, hi = g.x1 - u, g.x1 + u
    # y >= 1 forces the sign pattern (nu, nu, +) on x1, x1 - u, x1 + u
    _require(hi > 0 and nu * lo > 0, "sign pattern of x1, x1 - d1 b1^2, x1 + d1 b1^2")
    d2, b2 = squarefree_split(abs(g.x1))
    d3, b3 = squarefree_split(nu * lo)
    d4, b4 = squarefree_split(hi)
    e = 1
    if d3 % 2 == 0 and d4 % 2 == 0:
        # x1 and d1 b1^2 both odd and both factors of odd 2-adic valuation:
        # the shared 2 moves out of d3, d4 into y
        e, d3, d4 = 2, d3 // 2, d4 // 2
    _require(g.d0 == d2 * d3 * d4, "d0 = d2 d3 d4")
    _require(g.y == e * b2 * b3 * b4, "y = e b2 b3 b4")
    data = CongruentDescentData(nu, g.d1, d2, d3, d4, g.b1, b2, b3, b4, e)
    bad = data.violations()
    _require(not bad, "; ".join(bad))
    return data


def compose_congruent(data: CongruentDescentData) -> tuple[Twist, TwistPoint]:
    bad = data.violations()
    if bad:
        raise ValidationError("invalid congruent descent data: " + "; ".join(bad))
    t = Twist(CONGRUENT, data.d)
    x = data.nu * data.d1 * data.d2 * data.b1 * data.b2**2
    y = data.y
    z = data.d1**2 * data.b1**3
    _require(t.contains(x, y, z), "recomposed point on curve")
    _require(gcd(gcd(x, y), z) == 1, "recomposed point primitive")
    return t, TwistPoint(x, y, z)


# --------------------------------------------------------------------------
# exhaustive uniqueness audit


@dataclass
class AuditReport:
    bound: int
    curves: list[tuple[int, int]] = field(default_factory=list)
    points_checked: int = 0
    congruent_points_checked: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _icbrt(n: int) -> int:
    r = round(n ** (1 / 3))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def all_general_tuples(params: CurveParams, d: int, P: TwistPoint) -> list[GeneralDescentData]:
    """Every valid general tuple for ``P``, found by searching all factorizations."""
    out = []
    for d1 in divisors(d):
        if P.z % (d1 * d1):
            continue
        c = P.z // (d1 * d1)
        b1 = _icbrt(c)
        if b1**3 != c or P.x % (d1 * b1):
            continue
        cand = GeneralDescentData(d // d1, d1, b1, P.x // (d1 * b1), P.y)
        if not cand.violations(params):
            out.append(cand)
    return out


def all_congruent_tuples(d: int, P: TwistPoint) -> list[CongruentDescentData]:
    """Every valid congruent tuple for ``P``, found by searching all factorizations."""
    out = []
    nu = 1 if P.x > 0 else -1
    divs = divisors(d)
    for d1 in divs:
        if P.z % (d1 * d1):
            continue
        c = P.z // (d1 * d1)
        b1 = _icbrt(c)
        if b1**3 != c:
            continue
        for d2 in divisors(d // d1):
            num = abs(P.x)
            if num % (d1 * d2 * b1):
                continue
            b2sq = num // (d1 * d2 * b1)
            if not is_square(b2sq):
                continue
            b2 = isqrt(b2sq)
            for e in (1, 2):
                if P.y % (e * b2):
                    continue
                rest = P.y // (e * b2)
                for d3 in divisors(d // (d1 * d2)):
                    d4 = d // (d1 * d2 * d3)
                    for b3 in divisors(rest):
                        cand = CongruentDescentData(nu, d1, d2, d3, d4, b1, b2, b3, rest // b3, e)
                        if not cand.violations():
                            out.append(cand)
    return out


def uniqueness_audit(
    params: CurveParams,
    bound: int,
    *,
    congruent: bool | None = None,
    sample: float = 1.0,
    seed: int = 0,
) -> AuditReport:
    """Exhaustive check over primitive on-curve triples with ``|x|, y, z <= bound``.

    For each triple (on whichever twist it lies, ``y, z >= 1``) every valid
    descent tuple is found by brute-force factorization search; exactly one
    must exist and it must equal :func:`decompose_general`'s answer. For
    ``(A, B) = (-1, 0)`` the complete 2-descent is audited the same way
    (skipping ``x = 0``). With ``sample < 1`` each point is audited with
    that probability, drawn from ``random.Random(seed)``.
    """
    if not 0 < sample <= 1:
        raise ValidationError("sample must be in (0, 1]")
    rng = random.Random(seed)
    if congruent is None:
        congruent = params == CONGRUENT
    report = AuditReport(bound, [(params.A, params.B)])
    for z in range(1, bound + 1):
        for x in range(-bound, bound + 1):
            rhs = params.cubic(x, z)
            if rhs <= 0:
                continue
            for y in range(1, bound + 1):
                den = y * y * z
                if rhs % den or gcd(gcd(x, y), z) != 1:
                    continue
                d = rhs // den
                if not is_squarefree(d):
                    continue
                if sample < 1 and rng.random() >= sample:
                    continue
                t = Twist(params, d)
                P = TwistPoint(x, y, z)
                report.points_checked += 1
                found = all_general_tuples(params, d, P)
                expected = decompose_general(t, P)
                if found != [expected]:
                    report.violations.append(
                        {"descent": "general", "d": d, "point": [x, y, z], "tuples": [asdict(f) for f in found]}
                    )
                if congruent and x != 0:
                    report.congruent_points_checked += 1
                    found_c = all_congruent_tuples(d, P)
                    if found_c != [decompose_congruent(t, P)]:
                        report.violations.append(
                            {"descent": "congruent", "d": d, "point": [x, y, z], "tuples": [asdict(f) for f in found_c]}
                        )
    return report


def recompose(params: CurveParams, d: int, P: TwistPoint) -> TwistPoint:
    """Round trip through the general descent; returns the recomposed point."""
    t = Twist(params, d)
    _, Q = compose_general(params, decompose_general(t, P))
    return Q

