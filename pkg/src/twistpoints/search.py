"""Enumeration of low-height points on all twists ``d <= X`` at once.

Every non-torsion point (taken with ``y >= 1``) comes from a unique triple
``(d1, b1, x1)`` via the general descent: put
``t = x1^3 + A x1 d1^2 b1^4 + B d1^3 b1^6``, split ``t = d0 y^2`` and keep
the triple when ``gcd(x1, d1 b1) = 1``, ``d0 d1 <= X`` and ``gcd(d0, d1) = 1``.
Since ``h_x = log max(|x1|, d1 b1^2)``, a cap on the naive height is a box
on ``(d1, b1, x1)``. A cap on the canonical height is turned into a naive
height box through the calibrated gap ``h_x/2 - hhat <= guard`` and then
re-checked on each candidate.

The inner loop over ``x1`` is vectorized with numpy whenever ``|t|`` fits
comfortably in int64; otherwise a pure-Python path is used.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import gcd, isqrt, log
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .arith import divisors, is_squarefree, primes_below, squarefree_split
from .curve import CurveParams, Twist, TwistPoint, is_torsion
from .descent import CONGRUENT, GeneralDescentData, descent_cubic
from .errors import DomainError, ResourceError, ValidationError
from .heights import DEFAULT_N_ITER, calibrate_gap, canonical_height

GUARD_MARGIN = 0.25
_INT64_SAFE = 1 << 62
_BATCH = 1 << 20


def default_guard(params: CurveParams) -> float:
    """Largest calibrated ``h_x/2 - hhat`` plus a safety margin."""
    return calibrate_gap(params).max_deficit + GUARD_MARGIN


@dataclass(frozen=True)
class SearchWindow:
    """Twist cap ``X`` plus exactly one of ``alpha`` (``exp hhat <= d^(1/8+alpha)``)
    or ``H`` (``exp h_x <= H``)."""

    X: int
    alpha: float | None = None
    H: float | None = None

    def __post_init__(self):
        if self.X < 1:
            raise ValidationError("X must be >= 1")
        if (self.alpha is None) == (self.H is None):
            raise ValidationError("set exactly one of alpha and H")
        if self.alpha is not None and self.alpha <= 0:
            raise ValidationError("alpha must be positive")
        if self.H is not None and self.H <= 0:
            raise ValidationError("H must be positive")

    def describe(self) -> dict:
        out = {"X": self.X}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        else:
            out["H"] = self.H
        return out


@dataclass(frozen=True)
class PointRecord:
    d: int
    point: TwistPoint
    h_x: float
    h_hat: float
    descent: GeneralDescentData

    def sort_key(self):
        return (self.d, self.h_x, self.point.x)

    def csv_row(self) -> list[str]:
        P, g = self.point, self.descent
        return [
            str(self.d), str(P.x), str(P.y), str(P.z),
            f"{self.h_x:.12g}", f"{self.h_hat:.12g}",
            str(g.d0), str(g.d1), str(g.b1), str(g.x1),
        ]


CSV_COLUMNS = ["d", "x", "y", "z", "h_x", "h_hat", "d0", "d1", "b1", "x1"]

FOUND, EXCEEDS_CAP, RANK_ZERO = "found", "exceeds_cap", "rank_zero_up_to_cap"


@dataclass(frozen=True)
class EtaResult:
    d: int
    status: str
    eta_log: float | None = None
    witness: PointRecord | None = None

    @property
    def excess(self) -> float | None:
        """``eta_log - log(d)/8``."""
        return None if self.eta_log is None else self.eta_log - log(self.d) / 8

    def as_dict(self) -> dict:
        out = {"d": self.d, "status": self.status}
        if self.status == FOUND:
            P = self.witness.point
            out.update(
                eta_log=round(self.eta_log, 12),
                witness={"x": P.x, "y": P.y, "z": P.z, "h_x": round(self.witness.h_x, 12)},
            )
        return out


# --------------------------------------------------------------------------
# acceptance filters (picklable, so workers can receive them)


@dataclass(frozen=True)
class _Filter:
    """Which candidates to keep.

    ``kind`` is ``"hx"`` (``h_x <= log H``), ``"alpha"``
    (``hhat <= (1/8 + alpha) log d``) or ``"cap"`` (``hhat <= cap``).
    """

    kind: str
    value: float
    guard: float = 0.0

    def hhat_limit(self, d: int) -> float | None:
        if self.kind == "alpha":
            return (0.125 + self.value) * log(d)
        if self.kind == "cap":
            return self.value
        return None

    def hx_limit(self, d: int) -> float:
        if self.kind == "hx":
            return log(self.value)
        return 2 * (self.hhat_limit(d) + self.guard)


def _box_bound(f: _Filter, X: int) -> int:
    """Integer bound on ``max(|x1|, d1 b1^2)`` covering every ``d <= X``."""
    if f.kind == "hx":
        return math.floor(f.value)
    lim = f.hx_limit(X) if f.kind == "alpha" else 2 * (f.value + f.guard)
    return math.floor(math.exp(lim))


def outer_pairs(M: int, X: int) -> list[tuple[int, int]]:
    """``(d1, b1)`` with ``d1`` squarefree, ``d1 <= X`` and ``d1 b1^2 <= M``."""
    pairs = []
    for d1 in range(1, min(M, X) + 1):
        if not is_squarefree(d1):
            continue
        b1 = 1
        while d1 * b1 * b1 <= M:
            pairs.append((d1, b1))
            b1 += 1
    return pairs


# --------------------------------------------------------------------------
# candidate sieve: (d1, b1, x1) -> (d0, y)


def _isqrt_vec(n: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(n.astype(np.float64))).astype(np.int64)
    for _ in range(2):
        r -= (r * r > n).astype(np.int64)
        r += ((r + 1) * (r + 1) <= n).astype(np.int64)
    return r


def _squarefree_part_capped(t: np.ndarray, cap: np.ndarray) -> np.ndarray:
    """Squarefree part of each positive ``t``, or 0 where it exceeds ``cap``."""
    n = t.size
    out = np.zeros(n, dtype=np.int64)
    if n == 0:
        return out
    idx = np.arange(n)
    rem = t.copy()
    s = np.ones(n, dtype=np.int64)
    cap = cap.copy()
    tmax = int(t.max())
    L = round(tmax ** (1 / 3)) + 2
    while L**3 <= tmax:
        L += 1
    for i, p in enumerate(primes_below(L + 1).tolist()):
        sub = np.flatnonzero(rem % p == 0)
        if sub.size:
            odd = np.zeros(sub.size, dtype=bool)
            cur, k = sub, np.arange(sub.size)
            while cur.size:
                rem[cur] //= p
                odd[k] ^= True
                more = rem[cur] % p == 0
                cur, k = cur[more], k[more]
            s[sub[odd]] *= p
        if i % 16 == 15:
            alive = s <= cap
            if not alive.all():
                idx, rem, s, cap = idx[alive], rem[alive], s[alive], cap[alive]
                if idx.size == 0:
                    return out
    # rem now has at most two prime factors, all above L
    r = _isqrt_vec(rem)
    square = r * r == rem
    ok = (s <= cap) & (square | (rem <= cap // np.maximum(s, 1)))
    final = np.where(square, s, s * np.where(ok, rem, 1))
    out[idx[ok]] = final[ok]
    return out


def _candidates_numpy(params: CurveParams, pairs: Sequence[tuple[int, int]], M: int, X: int):
    A, B = params.A, params.B
    xs = np.arange(-M, M + 1, dtype=np.int64)
    per = xs.size
    step = max(1, _BATCH // per)
    out = []
    for start in range(0, len(pairs), step):
        chunk = np.asarray(pairs[start : start + step], dtype=np.int64)
        d1 = np.repeat(chunk[:, 0], per)
        b1 = np.repeat(chunk[:, 1], per)
        x1 = np.tile(xs, len(chunk))
        keep = np.gcd(x1, d1 * b1) == 1
        d1, b1, x1 = d1[keep], b1[keep], x1[keep]
        w = d1 * b1 * b1
        t = x1 * x1 * x1 + A * x1 * (w * w) + B * (w * w * w)
        keep = t >= 1
        d1, b1, x1, t = d1[keep], b1[keep], x1[keep], t[keep]
        d0 = _squarefree_part_capped(t, X // d1)
        keep = (d0 > 0) & (np.gcd(d0, d1) == 1)
        d1, b1, x1, t, d0 = d1[keep], b1[keep], x1[keep], t[keep], d0[keep]
        y = _isqrt_vec(t // d0)
        assert np.all(d0 * y * y == t)
        out.extend(zip(d1.tolist(), b1.tolist(), x1.tolist(), d0.tolist(), y.tolist()))
    return out


def _candidates_python(params: CurveParams, pairs: Sequence[tuple[int, int]], M: int, X: int):
    out = []
    for d1, b1 in pairs:
        for x1 in range(-M, M + 1):
            if gcd(x1, d1 * b1) != 1:
                continue
            t = descent_cubic(params, d1, b1, x1)
            if t < 1:
                continue
            d0, y = squarefree_split(t)
            if d0 * d1 <= X and gcd(d0, d1) == 1:
                out.append((d1, b1, x1, d0, y))
    return out


def _int64_ok(params: CurveParams, M: int) -> bool:
    return (1 + abs(params.A) + abs(params.B)) * (M + 1) ** 3 < _INT64_SAFE


def find_candidates(params, pairs, M, X, backend="auto"):
    """Descent triples in the box whose ``t`` splits with ``d0 d1 <= X``."""
    if backend == "python" or (backend == "auto" and not _int64_ok(params, M)):
        return _candidates_python(params, pairs, M, X)
    if not _int64_ok(params, M):
        raise DomainError("numpy backend needs |t| < 2**62")
    return _candidates_numpy(params, pairs, M, X)


# --------------------------------------------------------------------------
# records


def _make_records(params, cands, flt: _Filter, n_iter: int, gap_bound: float | None):
    out = []
    for d1, b1, x1, d0, y in cands:
        d = d0 * d1
        u = d1 * b1 * b1
        h_x = log(max(abs(x1), u))
        if h_x > flt.hx_limit(d):
            continue
        t = Twist(params, d)
        P = TwistPoint(d1 * b1 * x1, y, d1 * u * b1)
        if is_torsion(t, P):
            continue
        h = canonical_height(t, P, n_iter, gap_bound=gap_bound).value
        lim = flt.hhat_limit(d)
        if lim is not None and h > lim:
            continue
        out.append(PointRecord(d, P, h_x, h, GeneralDescentData(d0, d1, b1, x1, y)))
    return out


def _work(args):
    params, pairs, M, X, flt, n_iter, gap_bound, backend = args
    cands = find_candidates(params, pairs, M, X, backend)
    return _make_records(params, cands, flt, n_iter, gap_bound)


def _run(params, X, flt, *, workers=1, n_iter=DEFAULT_N_ITER, max_candidates=None, resume=0, backend="auto"):
    M = _box_bound(flt, X)
    if M < 1:
        return []
    pairs = outer_pairs(M, X)[resume:]
    truncated = None
    if max_candidates is not None:
        per = 2 * M + 1
        allowed = max_candidates // per
        if allowed < len(pairs):
            truncated = resume + allowed
            pairs = pairs[:allowed]
    gap_bound = calibrate_gap(params).bound + 1.0
    jobs = [(params, pairs[i::workers], M, X, flt, n_iter, gap_bound, backend) for i in range(workers)]
    if workers == 1:
        parts = [_work(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_work, jobs))
    records = sorted((r for part in parts for r in part), key=PointRecord.sort_key)
    if truncated is not None:
        raise ResourceError(
            f"candidate budget {max_candidates} exhausted; resume from pair {truncated}",
            partial=records,
            cursor=truncated,
        )
    return records


def _filter_for(params: CurveParams, w: SearchWindow, guard: float | None) -> _Filter:
    if w.H is not None:
        return _Filter("hx", float(w.H))
    return _Filter("alpha", float(w.alpha), default_guard(params) if guard is None else guard)


def enumerate_low_points(
    params: CurveParams,
    w: SearchWindow,
    *,
    workers: int = 1,
    n_iter: int = DEFAULT_N_ITER,
    guard: float | None = None,
    max_candidates: int | None = None,
    resume: int = 0,
    backend: str = "auto",
) -> Iterator[PointRecord]:
    """Non-torsion points (``y >= 1``) on every squarefree ``d <= X`` inside the window.

    Output is sorted by ``(d, h_x, x)`` whatever the worker count. With
    ``max_candidates`` set, running out of budget raises ``ResourceError``
    whose ``partial`` holds the records found so far and whose ``cursor``
    can be passed back as ``resume``.
    """
    flt = _filter_for(params, w, guard)
    yield from _run(params, w.X, flt, workers=workers, n_iter=n_iter,
                    max_candidates=max_candidates, resume=resume, backend=backend)


# --------------------------------------------------------------------------
# counters


def count_N_star(params: CurveParams, X: int, alpha: float, *, both_signs: bool = True, **kw) -> int:
    """Number of non-torsion points with ``exp hhat <= d^(1/8+alpha)``, ``d <= X``.

    ``P`` and ``-P`` count as two points unless ``both_signs`` is false.
    """
    n = sum(1 for _ in enumerate_low_points(params, SearchWindow(X, alpha=alpha), **kw))
    return 2 * n if both_signs else n


def count_N(params: CurveParams, X: int, alpha: float, **kw) -> int:
    """Number of squarefree ``d <= X`` with ``eta_d <= d^(1/8+alpha)``."""
    return len({r.d for r in enumerate_low_points(params, SearchWindow(X, alpha=alpha), **kw)})


class CountRow(NamedTuple):
    X: int
    N: int
    N_star: int


def count_series(records: Iterable[PointRecord], X_list: Sequence[int], *, both_signs: bool = True) -> list[CountRow]:
    """``N`` and ``N*`` at each ``X`` from one alpha-window run at ``max(X_list)``."""
    recs = list(records)
    rows = []
    for X in sorted(X_list):
        inside = [r for r in recs if r.d <= X]
        n_star = len(inside) * (2 if both_signs else 1)
        rows.append(CountRow(X, len({r.d for r in inside}), n_star))
    return rows


def nstar_series(params: CurveParams, alpha: float, X_list: Sequence[int], *, both_signs=True, **kw) -> list[CountRow]:
    records = enumerate_low_points(params, SearchWindow(max(X_list), alpha=alpha), **kw)
    return count_series(records, X_list, both_signs=both_signs)


# --------------------------------------------------------------------------
# eta


def tunnell_rank_zero(n: int) -> bool:
    """True when Tunnell's criterion proves ``n`` is not a congruent number.

    For squarefree ``n`` a congruent number forces the representation counts
    to satisfy ``2 * #{2x^2+y^2+32z^2 = n} = #{2x^2+y^2+8z^2 = n}`` (odd
    ``n``), resp. the analogue with ``4x^2`` and ``n/2`` (even ``n``). This
    direction is unconditional, so a mismatch certifies rank zero of
    ``n y^2 = x^3 - x``.
    """
    if n % 2:
        m, a = n, 2
    else:
        m, a = n // 2, 4

    def reps(c: int) -> int:
        total = 0
        for x in range(-isqrt(m // a), isqrt(m // a) + 1):
            for z in range(-isqrt(m // c), isqrt(m // c) + 1):
                r = m - a * x * x - c * z * z
                if r < 0:
                    continue
                y = isqrt(r)
                if y * y == r:
                    total += 1 if y == 0 else 2
        return total

    return 2 * reps(32) != reps(8)


def rank_zero_certified(params: CurveParams, d: int) -> bool:
    return params == CONGRUENT and tunnell_rank_zero(d)


def eta(
    params: CurveParams,
    d: int,
    cap_log: float,
    *,
    n_iter: int = DEFAULT_N_ITER,
    guard: float | None = None,
) -> EtaResult:
    """``log eta_d`` if some non-torsion point has ``hhat <= cap_log``.

    Searches the descent box of the single twist ``d``: for each ``d1 | d``
    the value ``t`` must equal ``(d/d1) * y^2``.
    """
    if d < 1 or not is_squarefree(d):
        raise ValidationError(f"d = {d} must be a positive squarefree integer")
    if rank_zero_certified(params, d):
        return EtaResult(d, RANK_ZERO)
    if cap_log <= 0:
        return EtaResult(d, EXCEEDS_CAP)
    guard = default_guard(params) if guard is None else guard
    M = math.floor(math.exp(2 * (cap_log + guard)))
    t = Twist(params, d)
    gap_bound = calibrate_gap(params).bound + 1.0
    best = None
    for d1 in divisors(d):
        d0 = d // d1
        b1 = 1
        while d1 * b1 * b1 <= M:
            for x1, y in _single_twist_x1(params, d0, d1, b1, M):
                u = d1 * b1 * b1
                P = TwistPoint(d1 * b1 * x1, y, d1 * u * b1)
                if is_torsion(t, P):
                    continue
                h = canonical_height(t, P, n_iter, gap_bound=gap_bound).value
                if h > cap_log:
                    continue
                rec = PointRecord(d, P, log(max(abs(x1), u)), h, GeneralDescentData(d0, d1, b1, x1, y))
                if best is None or (h, rec.sort_key()) < (best.h_hat, best.sort_key()):
                    best = rec
            b1 += 1
    if best is None:
        return EtaResult(d, EXCEEDS_CAP)
    return EtaResult(d, FOUND, best.h_hat, best)


def _single_twist_x1(params, d0, d1, b1, M):
    """``(x1, y)`` with ``|x1| <= M``, ``gcd(x1, d1 b1) = 1`` and ``t = d0 y^2``."""
    if _int64_ok(params, M) and d0 < _INT64_SAFE:
        x1 = np.arange(-M, M + 1, dtype=np.int64)
        x1 = x1[np.gcd(x1, d1 * b1) == 1]
        w = d1 * b1 * b1
        t = x1 * x1 * x1 + params.A * x1 * (w * w) + params.B * (w * w * w)
        keep = (t > 0) & (t % d0 == 0)
        x1, q = x1[keep], t[keep] // d0
        y = _isqrt_vec(q)
        keep = y * y == q
        return list(zip(x1[keep].tolist(), y[keep].tolist()))
    out = []
    for x1 in range(-M, M + 1):
        if gcd(x1, d1 * b1) != 1:
            continue
        t = descent_cubic(params, d1, b1, x1)
        if t > 0 and t % d0 == 0:
            y = isqrt(t // d0)
            if y * y * d0 == t:
                out.append((x1, y))
    return out


def eta_scan(
    params: CurveParams,
    X: int,
    cap_log: float,
    *,
    workers: int = 1,
    n_iter: int = DEFAULT_N_ITER,
    guard: float | None = None,
    certify_rank_zero: bool = True,
) -> list[EtaResult]:
    """``EtaResult`` for every squarefree ``d <= X`` from a single enumeration."""
    results = {}
    if cap_log > 0:
        flt = _Filter("cap", float(cap_log), default_guard(params) if guard is None else guard)
        for rec in _run(params, X, flt, workers=workers, n_iter=n_iter):
            cur = results.get(rec.d)
            if cur is None or (rec.h_hat, rec.sort_key()) < (cur.h_hat, cur.sort_key()):
                results[rec.d] = rec
    out = []
    for d in range(1, X + 1):
        if not is_squarefree(d):
            continue
        if d in results:
            out.append(EtaResult(d, FOUND, results[d].h_hat, results[d]))
        elif certify_rank_zero and rank_zero_certified(params, d):
            out.append(EtaResult(d, RANK_ZERO))
        else:
            out.append(EtaResult(d, EXCEEDS_CAP))
    return out


def eta_slack_constant(params: CurveParams) -> float:
    """Run-independent ``C`` with ``eta_log >= log(d)/8 - C``.

    The descent gives ``d <= (1 + |A| + |B|) max(|x1|, d1 b1^2)^4``, so
    ``h_x >= log(d)/4 - log(1 + |A| + |B|)/4``; the calibrated gap then
    bounds how far ``hhat`` can sit below ``h_x/2``.
    """
    return calibrate_gap(params).max_deficit + log(1 + abs(params.A) + abs(params.B)) / 8


def lower_bound_constant(results: Iterable[EtaResult]) -> float:
    """Smallest ``C`` with ``eta_log >= log(d)/8 - C`` over the found results."""
    excess = [r.excess for r in results if r.status == FOUND]
    if not excess:
        raise DomainError("no found results")
    return max(0.0, -min(excess))


# --------------------------------------------------------------------------
# sharpness family


class FamilyMember(NamedTuple):
    d: int
    d1: int
    x1: int
    record: PointRecord
    ratio: float  # exp(hhat) / d^(1/8)


def minimal_family(params: CurveParams, d1_max: int, x1_max: int, *, n_iter: int = DEFAULT_N_ITER) -> list[FamilyMember]:
    """Witnesses ``(d1 x1 : 1 : d1^2)`` on ``d = d1 (x1^3 + A x1 d1^2 + B d1^3)``."""
    if d1_max < 1 or x1_max < 1:
        raise DomainError("bounds must be >= 1")
    out = []
    for d1 in range(1, d1_max + 1):
        for x1 in range(1, x1_max + 1):
            if gcd(x1, d1) != 1:
                continue
            t = descent_cubic(params, d1, 1, x1)
            if t < 1:
                continue
            d = d1 * t
            if not is_squarefree(d):
                continue
            tw = Twist(params, d)
            P = TwistPoint(d1 * x1, 1, d1 * d1)
            assert tw.contains(P.x, P.y, P.z)
            if is_torsion(tw, P):
                continue
            h = canonical_height(tw, P, n_iter).value
            rec = PointRecord(d, P, log(max(x1, d1)), h, GeneralDescentData(t, d1, 1, x1, 1))
            out.append(FamilyMember(d, d1, x1, rec, math.exp(h - log(d) / 8)))
    out.sort(key=lambda m: (m.d, m.d1, m.x1))
    return out


# --------------------------------------------------------------------------
# exponent fitting


class ExponentFit(NamedTuple):
    slope: float
    intercept: float
    residual: float  # RMS residual in log space
    used: int
    dropped: int


def fit_exponent(series: Iterable[tuple[float, float]]) -> ExponentFit:
    """Least-squares line through ``(log X, log count)``; zero counts are dropped."""
    pts = [(X, c) for X, c in series]
    good = [(X, c) for X, c in pts if X > 0 and c > 0]
    if len(good) < 3:
        raise DomainError("need at least 3 positive entries")
    lx = np.log([X for X, _ in good])
    lc = np.log([c for _, c in good])
    slope, intercept = np.polyfit(lx, lc, 1)
    resid = lc - (slope * lx + intercept)
    return ExponentFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), len(good), len(pts) - len(good))


# --------------------------------------------------------------------------
# output


def records_csv(records: Iterable[PointRecord], header: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def run_summary(params: CurveParams, w: SearchWindow, records: Sequence[PointRecord], **extra) -> dict:
    summary = {
        "curve": [params.A, params.B],
        "window": w.describe(),
        "points": len(records),
        "N": len({r.d for r in records}),
        "N_star": 2 * len(records),
    }
    summary.update(extra)
    return summary


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
