"""Real quadratic fields: fundamental units, class numbers, and averages.

``D`` is always the fundamental discriminant itself. Units are written
``eps_D = (t + u sqrt(D)) / 2`` so that ``t^2 - D u^2 = +-4``.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import NamedTuple, Sequence

import mpmath
import numpy as np

from .arith import factor, is_squarefree
from .errors import DomainError, PrecisionError, ResourceError

DEFAULT_UNIT_BITS = 1 << 20
SLACK = 0.05


def is_fundamental_discriminant(D: int) -> bool:
    if D <= 1:
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def _require_fundamental(D: int) -> None:
    if not is_fundamental_discriminant(D):
        raise DomainError(f"{D} is not a positive fundamental discriminant")


class Unit(NamedTuple):
    t: int
    u: int
    log_eps: float
    norm: int  # +1 or -1


def _log_unit(t: int, u: int, D: int) -> float:
    """``log((t + u sqrt(D)) / 2)`` for positive ``t, u`` of any size."""
    k = max(t.bit_length(), u.bit_length()) - 900
    if k > 0:
        t, u = t >> k, u >> k
    else:
        k = 0
    return math.log(t + u * math.sqrt(D)) + k * math.log(2) - math.log(2)


def fundamental_unit(D: int, *, max_bits: int = DEFAULT_UNIT_BITS) -> Unit:
    """Fundamental unit via the continued fraction of ``(s + sqrt(D)) / 2``.

    ``s = D mod 4``. The expansion runs on exact states ``(P, Q)`` with
    complete quotients ``(P + sqrt(D)) / Q``; the period ends at the first
    ``Q = 2`` after the start. If the convergents outgrow ``max_bits``,
    ``ResourceError`` is raised with ``partial`` set to ``log_eps``
    obtained by summing the logs of the complete quotients over the period.
    """
    _require_fundamental(D)
    r = isqrt(D)
    sqrtD = math.sqrt(D)
    s = D % 4
    P, Q = s, 2
    p0, p1 = 1, 0  # p_{k-1}, p_{k-2}
    q0, q1 = 0, 1
    log_sum = 0.0
    exact = True
    k = 0
    while True:
        a = (P + r) // Q
        if exact:
            p0, p1 = a * p0 + p1, p0
            q0, q1 = a * q0 + q1, q0
            if q0.bit_length() > max_bits:
                exact = False
        P = a * Q - P
        Q = (D - P * P) // Q
        k += 1
        log_sum += math.log((P + sqrtD) / Q)
        if Q == 2:
            break
    if not exact:
        raise ResourceError(f"unit for D = {D} exceeds {max_bits} bits", partial=log_sum)
    t, u = 2 * p0 - q0 * s, q0
    n4 = t * t - D * u * u
    if n4 not in (4, -4):
        raise ArithmeticError(f"continued fraction did not produce a unit for D = {D}")
    return Unit(t, u, _log_unit(t, u, D), n4 // 4)


# --------------------------------------------------------------------------
# quadratic character and class number


@lru_cache(maxsize=4096)
def _legendre_table(p: int) -> np.ndarray:
    tab = -np.ones(p, dtype=np.int8)
    tab[0] = 0
    tab[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    return tab


# values on a mod 8 for the 2-parts -4, 8, -8
_TWO_PART = {
    -4: np.array([0, 1, 0, -1, 0, 1, 0, -1], dtype=np.int8),
    8: np.array([0, 1, 0, -1, 0, -1, 0, 1], dtype=np.int8),
    -8: np.array([0, 1, 0, 1, 0, -1, 0, -1], dtype=np.int8),
}


def character_values(D: int) -> np.ndarray:
    """``kronecker(D, a)`` for ``a = 0 .. D-1`` as an int8 array."""
    _require_fundamental(D)
    a = np.arange(D, dtype=np.int64)
    chi = np.ones(D, dtype=np.int8)
    rest = D
    for p, _ in factor(D).factors:
        if p == 2:
            continue
        chi *= _legendre_table(p)[a % p]
        rest //= p if p % 4 == 1 else -p
    if rest != 1:
        chi *= _TWO_PART[rest][a % 8]
    return chi


def _class_number_float(D: int, log_eps: float) -> float:
    a = np.arange(1, D, dtype=np.float64)
    chi = character_values(D)[1:].astype(np.float64)
    S = -np.dot(chi, np.log(np.sin(np.pi * a / D)))
    return S / (2 * log_eps)


def _class_number_mp(D: int, unit: Unit, dps: int) -> mpmath.mpf:
    chi = character_values(D)
    with mpmath.workdps(dps):
        S = mpmath.fsum(-int(chi[a]) * mpmath.log(mpmath.sin(mpmath.pi * a / D)) for a in range(1, D) if chi[a])
        eps = (unit.t + unit.u * mpmath.sqrt(D)) / 2
        return S / (2 * mpmath.log(eps))


def class_number(D: int, *, unit: Unit | None = None) -> int:
    """Class number from the analytic formula ``h = sqrt(D) L(1, chi_D) / (2 log eps_D)``.

    ``L(1, chi_D)`` is the finite sum ``-D^(-1/2) sum chi(a) log sin(pi a / D)``.
    The float result must be within 0.05 of an integer; otherwise the sum
    is redone in mpmath at increasing precision.
    """
    _require_fundamental(D)
    unit = fundamental_unit(D) if unit is None else unit
    h = _class_number_float(D, unit.log_eps)
    dps = 30
    while abs(h - round(h)) >= SLACK:
        if dps > 240:
            raise PrecisionError(f"class number for D = {D} not integral: {h}")
        h = float(_class_number_mp(D, unit, dps))
        dps *= 2
    if round(h) < 1:
        raise PrecisionError(f"class number for D = {D} rounds to {round(h)}")
    return int(round(h))


# --------------------------------------------------------------------------
# tables and averages


@dataclass(frozen=True)
class PellData:
    D: int
    t: int
    u: int
    log_eps: float
    class_number: int

    def csv_row(self) -> list[str]:
        return [str(self.D), str(self.t), str(self.u), f"{self.log_eps:.15g}", str(self.class_number)]


def fundamental_discriminants(X: int) -> list[int]:
    return [D for D in range(5, X + 1) if is_fundamental_discriminant(D)]


def pell_data(D: int) -> PellData:
    unit = fundamental_unit(D)
    return PellData(D, unit.t, unit.u, unit.log_eps, class_number(D, unit=unit))


def _pell_chunk(Ds):
    return [pell_data(D) for D in Ds]


def pell_table(X: int, *, workers: int = 1) -> list[PellData]:
    """``PellData`` for every fundamental ``D <= X``, in increasing ``D``."""
    Ds = fundamental_discriminants(X)
    if workers <= 1:
        return _pell_chunk(Ds)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_pell_chunk, [Ds[i::workers] for i in range(workers)]))
    return sorted((row for part in parts for row in part), key=lambda r: r.D)


def pell_csv(rows: Sequence[PellData], header: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["D", "t", "u", "log_eps", "h"])
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()


class SiegelAverage(NamedTuple):
    total: float
    ratio: float  # total / X^(3/2)
    count: int


def siegel_average(X: int, *, workers: int = 1, table: Sequence[PellData] | None = None) -> SiegelAverage:
    """``sum h(D) log eps_D`` over fundamental ``D <= X`` and its ratio to ``X^(3/2)``."""
    if X < 1:
        raise DomainError("X must be >= 1")
    rows = pell_table(X, workers=workers) if table is None else [r for r in table if r.D <= X]
    total = math.fsum(r.class_number * r.log_eps for r in rows)
    return SiegelAverage(total, total / X**1.5, len(rows))


class Block(NamedTuple):
    lo: int  # exclusive
    hi: int  # inclusive
    total: int
    hits: int

    @property
    def fraction(self) -> float:
        return self.hits / self.total if self.total else float("nan")


class FrequencyReport(NamedTuple):
    fraction: float
    hits: int
    total: int
    blocks: list[Block]
    misses: list[int]  # D with eps_D below the threshold


def conjA_frequency(X: int, eps: float, *, workers: int = 1, table: Sequence[PellData] | None = None) -> FrequencyReport:
    """Share of fundamental ``D <= X`` with ``log eps_D > D^(1/2 - eps)``, also per dyadic block."""
    if X < 1:
        raise DomainError("X must be >= 1")
    if table is None:
        Ds = fundamental_discriminants(X)
        logs = {D: _unit_log(D) for D in Ds} if workers <= 1 else _unit_logs_parallel(Ds, workers)
    else:
        logs = {r.D: r.log_eps for r in table if r.D <= X}
    hit = {D: lg > D ** (0.5 - eps) for D, lg in logs.items()}
    blocks = []
    lo = 4
    while lo < X:
        hi = min(2 * lo, X)
        inside = [D for D in hit if lo < D <= hi]
        blocks.append(Block(lo, hi, len(inside), sum(hit[D] for D in inside)))
        lo = hi
    hits = sum(hit.values())
    total = len(hit)
    return FrequencyReport(hits / total if total else 0.0, hits, total, blocks, sorted(D for D, h in hit.items() if not h))


def _unit_log(D: int) -> float:
    try:
        return fundamental_unit(D).log_eps
    except ResourceError as exc:
        return exc.partial


def _log_chunk(Ds):
    return [(D, _unit_log(D)) for D in Ds]


def _unit_logs_parallel(Ds, workers):
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_log_chunk, [Ds[i::workers] for i in range(workers)])
        return dict(pair for part in parts for pair in part)


def trivial_unit_bound(D: int) -> float:
    """``log(D)/2 - log(4)/2 - 1``, below ``log eps_D`` for every fundamental ``D``."""
    return 0.5 * math.log(D / 4) - 1
