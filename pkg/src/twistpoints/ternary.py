"""Primitive solutions of ``f1 u1 v1^2 + f2 u2 v2^2 + f3 u3 v3^2 = 0`` in boxes.

A solution is a pair ``(u, v)`` of nonzero integer triples with
``|u_i| <= U_i``, ``|v_i| <= V_i`` and ``gcd(u_i v_i, u_j v_j) = 1`` for
``i != j``. The counter loops over ``v`` and a numpy grid of ``(u1, u2)``
and solves for ``u3`` by exact division.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import gcd
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ResourceError, ValidationError

DEFAULT_BUDGET = 2 * 10**9
DEFAULT_EPS = 0.05

# predicate(u, v) -> bool, called with signed triples
Predicate = Callable[[tuple[int, int, int], tuple[int, int, int]], bool]


@dataclass(frozen=True)
class TernaryForm:
    f1: int
    f2: int
    f3: int

    def __post_init__(self):
        f = self.coeffs
        if 0 in f:
            raise ValidationError("coefficients must be nonzero")
        if gcd(f[0], f[1]) != 1 or gcd(f[0], f[2]) != 1 or gcd(f[1], f[2]) != 1:
            raise ValidationError(f"coefficients {f} are not pairwise coprime")

    @property
    def coeffs(self) -> tuple[int, int, int]:
        return (self.f1, self.f2, self.f3)

    def value(self, u, v) -> int:
        return sum(f * a * b * b for f, a, b in zip(self.coeffs, u, v))


@dataclass(frozen=True)
class BoxBounds:
    U1: float
    U2: float
    U3: float
    V1: float
    V2: float
    V3: float

    def __post_init__(self):
        for name in ("U1", "U2", "U3", "V1", "V2", "V3"):
            if not getattr(self, name) >= 1:
                raise ValidationError(f"{name} = {getattr(self, name)} must be >= 1")

    @classmethod
    def cube(cls, U: float, V: float) -> "BoxBounds":
        return cls(U, U, U, V, V, V)

    @property
    def U(self) -> tuple[int, int, int]:
        return (math.floor(self.U1), math.floor(self.U2), math.floor(self.U3))

    @property
    def V(self) -> tuple[int, int, int]:
        return (math.floor(self.V1), math.floor(self.V2), math.floor(self.V3))

    def as_tuple(self) -> tuple[float, ...]:
        return (self.U1, self.U2, self.U3, self.V1, self.V2, self.V3)


def _volume(box: BoxBounds) -> int:
    U, V = box.U, box.V
    return 4 * U[0] * U[1] * V[0] * V[1] * V[2]


def _signed_range(n: int) -> np.ndarray:
    r = np.arange(1, n + 1, dtype=np.int64)
    return np.concatenate([-r[::-1], r])


def _count_slice(f: TernaryForm, box: BoxBounds, v1_values: Sequence[int], predicate: Predicate | None) -> int:
    f1, f2, f3 = f.coeffs
    U, V = box.U, box.V
    u1 = np.repeat(_signed_range(U[0]), 2 * U[1])
    u2 = np.tile(_signed_range(U[1]), 2 * U[0])
    total = 0
    for v1 in v1_values:
        a1 = f1 * u1 * (v1 * v1)
        for v2 in range(1, V[1] + 1):
            if gcd(v1, v2) != 1:
                continue
            s = a1 + f2 * u2 * (v2 * v2)
            base = np.gcd(u1 * v1, u2 * v2) == 1
            for v3 in range(1, V[2] + 1):
                if gcd(v1, v3) != 1 or gcd(v2, v3) != 1:
                    continue
                den = f3 * v3 * v3
                ok = base & (s % den == 0)
                u3 = np.zeros_like(s)
                u3[ok] = -s[ok] // den
                ok &= (u3 != 0) & (np.abs(u3) <= U[2])
                w3 = u3 * v3
                ok &= (np.gcd(w3, u1 * v1) == 1) & (np.gcd(w3, u2 * v2) == 1)
                if predicate is None:
                    total += 8 * int(np.count_nonzero(ok))
                    continue
                for i in np.flatnonzero(ok).tolist():
                    u = (int(u1[i]), int(u2[i]), int(u3[i]))
                    for s1 in (1, -1):
                        for s2 in (1, -1):
                            for s3 in (1, -1):
                                if predicate(u, (s1 * v1, s2 * v2, s3 * v3)):
                                    total += 1
    return total


def _slice_job(args):
    return _count_slice(*args)


def count_solutions(
    f: TernaryForm,
    box: BoxBounds,
    *,
    predicate: Predicate | None = None,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> int:
    """Exact number of primitive solutions in the box.

    ``predicate``, if given, receives each solution ``(u, v)`` (with the
    signs of ``v`` spelled out) and only accepted solutions are counted.
    Work is split along ``v1`` across ``workers`` processes.
    """
    if _volume(box) > budget:
        raise ResourceError(f"box volume {_volume(box)} exceeds budget {budget}")
    v1s = list(range(1, box.V[0] + 1))
    if workers <= 1:
        return _count_slice(f, box, v1s, predicate)
    jobs = [(f, box, v1s[i::workers], predicate) for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_slice_job, jobs))


def bound_value(f: TernaryForm | None, box: BoxBounds, eps: float) -> float:
    """``(U1 U2 U3)^(2/3 + eps) * (V1 V2 V3)^(1/3)``.

    ``f`` only enters the implied constant, so it is accepted and ignored.
    """
    if eps < 0:
        raise DomainError("eps must be >= 0")
    b = box
    return (b.U1 * b.U2 * b.U3) ** (2 / 3 + eps) * (b.V1 * b.V2 * b.V3) ** (1 / 3)


class ScanRow(NamedTuple):
    scale: float
    box: BoxBounds
    count: int
    bound: float
    ratio: float


@dataclass
class ScanReport:
    form: TernaryForm
    eps: float
    rows: list[ScanRow]

    @property
    def max_ratio(self) -> float:
        return max(r.ratio for r in self.rows)

    def ratio_slope(self) -> float | None:
        """Log-log slope of ``ratio`` against ``scale``; ``<= 0`` means no growth."""
        pts = [(r.scale, r.ratio) for r in self.rows if r.ratio > 0]
        if len(pts) < 2:
            return None
        x = np.log([p[0] for p in pts])
        y = np.log([p[1] for p in pts])
        return float(np.polyfit(x, y, 1)[0])

    def to_csv(self, header: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scale", "U1", "U2", "U3", "V1", "V2", "V3", "count", "bound", "ratio"])
        for r in self.rows:
            w.writerow([f"{r.scale:g}", *(f"{x:g}" for x in r.box.as_tuple()), r.count, f"{r.bound:.12g}", f"{r.ratio:.12g}"])
        return buf.getvalue()


def scale_list(lo: float, hi: float) -> list[float]:
    """Doubling sequence ``lo, 2 lo, ...`` up to ``hi``."""
    if lo < 1 or hi < lo:
        raise ValidationError("need 1 <= lo <= hi")
    out, s = [], float(lo)
    while s <= hi * (1 + 1e-12):
        out.append(s)
        s *= 2
    return out


def exponent_scan(
    f: TernaryForm,
    scales: Sequence[float],
    *,
    eps: float = DEFAULT_EPS,
    fixed_V: float | None = None,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> ScanReport:
    """Count in the boxes ``U_i = V_i = scale`` and compare with the bound.

    With ``fixed_V`` the ``V_i`` stay at that value and only ``U`` grows.
    """
    if not scales:
        raise DomainError("empty scale list")
    rows = []
    for s in scales:
        box = BoxBounds.cube(s, s if fixed_V is None else fixed_V)
        c = count_solutions(f, box, workers=workers, budget=budget)
        b = bound_value(f, box, eps)
        rows.append(ScanRow(s, box, c, b, c / b))
    return ScanReport(f, eps, rows)
