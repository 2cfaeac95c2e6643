"""Exact integer utilities: factorization, squarefree structure, Kronecker symbol.

All public functions accept integers in ``1 <= n < 2**96``. Factorization is
trial division by a table of primes below ``2**20`` followed by Brent's
variant of Pollard rho. Primality is deterministic Miller-Rabin below
3.3e24; above that a Baillie-PSW test is added.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from functools import reduce
from math import gcd, isqrt
from typing import NamedTuple

import gmpy2
import numpy as np

from .errors import DomainError, RangeError

MAX_INPUT = 1 << 96
TRIAL_LIMIT = 1 << 20

# Miller-Rabin with these bases is deterministic for n < 3317044064679887385961981.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC = 3317044064679887385961981

_prime_table: list[int] | None = None
_table_lock = threading.Lock()


def primes_below(n: int) -> np.ndarray:
    """All primes ``p < n`` as an int64 array (sieve of Eratosthenes)."""
    if n <= 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, isqrt(n - 1) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def small_primes() -> list[int]:
    """The shared read-only table of primes below ``TRIAL_LIMIT``."""
    global _prime_table
    if _prime_table is None:
        with _table_lock:
            if _prime_table is None:
                _prime_table = primes_below(TRIAL_LIMIT).tolist()
    return _prime_table


def _check_range(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"expected an integer, got {type(n).__name__}")
    if not 1 <= n < MAX_INPUT:
        raise RangeError(f"{n} outside supported range [1, 2**96)")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    if n < _MR_DETERMINISTIC:
        return True
    return bool(gmpy2.is_bpsw_prp(n))


def _brent(n: int, rng: random.Random) -> int:
    """A nontrivial factor of the odd composite ``n``."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))

    def recompose(self) -> int:
        return reduce(lambda acc, pe: acc * pe[0] ** pe[1], self.factors, 1)

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)


class SquarefreeSplit(NamedTuple):
    """``n = s * q**2`` with ``s`` squarefree."""

    s: int
    q: int


def factor(n: int) -> Factorization:
    """Prime factorization of ``1 <= n < 2**96``; ``factor(1)`` is empty."""
    _check_range(n)
    n = int(n)
    value = n
    found: dict[int, int] = {}
    for i, p in enumerate(small_primes()):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
        # a large prime cofactor would otherwise walk the whole table
        if i & 255 == 255 and is_prime(n):
            break
    if n > 1:
        rng = random.Random(n)
        stack = [n]
        while stack:
            m = stack.pop()
            if is_prime(m):
                found[m] = found.get(m, 0) + 1
                continue
            r = isqrt(m)
            if r * r == m:
                stack += [r, r]
                continue
            f = _brent(m, rng)
            stack += [f, m // f]
    return Factorization(value, tuple(found.items()))


def squarefree_split(n: int) -> SquarefreeSplit:
    """The unique ``(s, q)`` with ``n = s*q**2`` and ``s`` squarefree."""
    s = q = 1
    for p, e in factor(n).factors:
        if e & 1:
            s *= p
        q *= p ** (e >> 1)
    return SquarefreeSplit(s, q)


def is_squarefree(n: int) -> bool:
    _check_range(n)
    if n % 4 == 0 or n % 9 == 0 or n % 25 == 0:
        return False
    return all(e == 1 for _, e in factor(n).factors)


def mobius(n: int) -> int:
    fac = factor(n).factors
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) & 1 else 1


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of ``n``."""
    divs = [1]
    for p, e in factor(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol ``(a/n)``; ``n == 0`` is rejected."""
    if n == 0:
        raise DomainError("kronecker symbol (a/0) is not supported")
    a, n = int(a), int(n)
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    v = (n & -n).bit_length() - 1
    if v:
        if a % 2 == 0:
            return 0
        n >>= v
        if v & 1 and a % 8 in (3, 5):
            result = -result
    a %= n
    # Jacobi symbol for odd n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def integer_log(n: int) -> float:
    """Natural log of a positive integer of any size."""
    n = int(n)
    k = n.bit_length()
    if k < 1000:
        return math.log(n)
    return math.log(n >> (k - 64)) + (k - 64) * math.log(2)
