"""Prime sieving, the von Mangoldt function and the tapering weight w_X.

The sieve keeps a bit-packed odd-only bitmap (one bit per odd integer), so a
limit of 10**9 costs about 60 MB for the bitmap itself.  Prefix sums of 1/p and
(log p)/p use Kahan compensation.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import DomainError, InsufficientSieveError

_SEGMENT = 1 << 22  # odd numbers per sieve segment


@numba.njit(cache=True)
def _kahan_cumsum(values):
    out = np.empty_like(values)
    s = 0.0
    c = 0.0
    for i in range(values.shape[0]):
        y = values[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out


def _small_primes(n):
    """Primes <= n by a plain bytearray sieve (used for segment seeding)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_odd_bits(limit):
    """Bit-packed flags for the odd numbers 1, 3, 5, ... <= limit."""
    n_odd = (limit + 1) // 2  # odd numbers 1..limit
    seeds = _small_primes(math.isqrt(limit))[1:]  # odd seed primes
    chunks = []
    for start in range(0, n_odd, _SEGMENT):
        stop = min(start + _SEGMENT, n_odd)
        seg = np.ones(stop - start, dtype=bool)
        lo = 2 * start + 1  # value represented by seg[0]
        for p in seeds:
            p = int(p)
            first = max(p * p, ((lo + p - 1) // p) * p)
            if first % 2 == 0:
                first += p
            if first > 2 * stop - 1:
                continue
            seg[(first - lo) // 2 :: p] = False
        if start == 0:
            seg[0] = False  # 1 is not prime
        chunks.append(np.packbits(seg, bitorder="little"))
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint8)


@dataclass(frozen=True)
class PrimeTable:
    """Immutable table of the primes up to ``limit`` with prefix sums.

    ``recip_prefix[i]`` is the compensated sum of ``1/primes[j]`` for ``j <= i``
    and ``logrecip_prefix`` the same for ``log(p)/p``.
    """

    limit: int
    primes: np.ndarray
    recip_prefix: np.ndarray
    logrecip_prefix: np.ndarray
    _odd_bits: np.ndarray = field(repr=False)

    def __len__(self):
        return int(self.primes.shape[0])

    def is_prime(self, n: int) -> bool:
        n = int(n)
        if n > self.limit:
            raise InsufficientSieveError(f"{n} exceeds sieve limit {self.limit}")
        if n < 2:
            return False
        if n == 2:
            return True
        if n % 2 == 0:
            return False
        k = n // 2
        return bool((self._odd_bits[k >> 3] >> (k & 7)) & 1)

    def primes_upto(self, bound: float) -> np.ndarray:
        if bound > self.limit:
            raise InsufficientSieveError(f"bound {bound} exceeds sieve limit {self.limit}")
        return self.primes[: self.count_upto(bound)]

    def count_upto(self, bound: float) -> int:
        return int(np.searchsorted(self.primes, math.floor(bound), side="right"))


def sieve_primes(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes up to ``limit`` (inclusive)."""
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    bits = _sieve_odd_bits(limit)
    n_odd = (limit + 1) // 2
    flags = np.unpackbits(bits, bitorder="little", count=n_odd).astype(bool)
    odd_primes = 2 * np.flatnonzero(flags).astype(np.int64) + 1
    primes = np.concatenate([np.array([2], dtype=np.int64), odd_primes])
    pf = primes.astype(np.float64)
    recip = _kahan_cumsum(1.0 / pf)
    logrecip = _kahan_cumsum(np.log(pf) / pf)
    for arr in (primes, recip, logrecip, bits):
        arr.setflags(write=False)
    return PrimeTable(limit, primes, recip, logrecip, bits)


def prime_reciprocal_sum(table: PrimeTable, bound: float) -> float:
    """Sum of 1/p over primes p <= bound."""
    if bound > table.limit:
        raise InsufficientSieveError(f"bound {bound} exceeds sieve limit {table.limit}")
    i = table.count_upto(bound)
    return float(table.recip_prefix[i - 1]) if i else 0.0


def prime_log_reciprocal_sum(table: PrimeTable, bound: float) -> float:
    """Sum of (log p)/p over primes p <= bound."""
    if bound > table.limit:
        raise InsufficientSieveError(f"bound {bound} exceeds sieve limit {table.limit}")
    i = table.count_upto(bound)
    return float(table.logrecip_prefix[i - 1]) if i else 0.0


# Deterministic Miller-Rabin witnesses, valid for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic primality test for integers of practical size."""
    n = int(n)
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
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def integer_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) computed exactly."""
    if k == 1:
        return n
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def prime_power_base(n: int) -> int | None:
    """Return p if n = p**k for a prime p and k >= 1, else None."""
    n = int(n)
    if n < 2:
        return None
    for k in range(n.bit_length(), 0, -1):
        r = integer_root(n, k)
        if r >= 2 and r**k == n and is_prime(r):
            return r
    return None


def von_mangoldt(n: int) -> float:
    """Lambda(n): log p when n is a power of the prime p, otherwise 0."""
    n = int(n)
    if n < 1:
        raise DomainError(f"von Mangoldt is defined for n >= 1, got {n}")
    p = prime_power_base(n)
    return math.log(p) if p else 0.0


def von_mangoldt_rational(num: int, den: int) -> float:
    """Lambda extended to positive rationals: zero unless num/den is an integer."""
    if num % den:
        return 0.0
    return von_mangoldt(num // den)


def weight_w(n: float, X: float) -> float:
    """The taper w_X(n): 1 on [1, X] and log(X^2/n)/log X on (X, X^2]."""
    if n > X * X:
        raise DomainError(f"w_X(n) is supported on n <= X^2; got n={n}, X={X}")
    if n <= X:
        return 1.0
    return math.log(X * X / n) / math.log(X)


def weight_w_array(n, X):
    n = np.asarray(n, dtype=np.float64)
    if np.any(n > X * X):
        raise DomainError("w_X(n) is supported on n <= X^2")
    return np.where(n <= X, 1.0, np.log(X * X / n) / math.log(X))


def weighted_lambda(n: int, X: float) -> float:
    """Lambda_X(n) = Lambda(n) w_X(n)."""
    return von_mangoldt(n) * weight_w(n, X)


def prime_powers_upto(table: PrimeTable, bound: float):
    """All prime powers p**k <= bound as (values, bases, exponents), sorted by value."""
    vals, bases, exps = [], [], []
    for p in table.primes_upto(bound):
        p = int(p)
        q, k = p, 1
        while q <= bound:
            vals.append(q)
            bases.append(p)
            exps.append(k)
            q *= p
            k += 1
    order = np.argsort(vals, kind="stable")
    return (
        np.asarray(vals, dtype=np.int64)[order],
        np.asarray(bases, dtype=np.int64)[order],
        np.asarray(exps, dtype=np.int64)[order],
    )


def _is_prime_power(m: int) -> bool:
    return prime_power_base(m) is not None


def nearest_prime_power_distance(x: float) -> float:
    """Distance from x to the closest prime power other than x itself."""
    if x <= 1:
        raise DomainError(f"x must exceed 1, got {x}")
    best = math.inf
    below = math.floor(x)
    while below >= 2:
        if below != x and _is_prime_power(below):
            best = x - below
            break
        below -= 1
    above = math.ceil(x)
    while above - x < best:
        if above != x and _is_prime_power(above):
            best = min(best, above - x)
            break
        above += 1
    return float(best)


def prime_index(table: PrimeTable, p: int) -> int:
    """Position of the prime p in ``table.primes``."""
    i = bisect_right(table.primes, p) - 1
    if i < 0 or table.primes[i] != p:
        raise DomainError(f"{p} is not a prime in the table")
    return i
