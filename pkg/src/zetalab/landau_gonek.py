"""Sums over zeros of x^(i gamma) and the combinatorics of powers of prime sums."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, InsufficientZerosError
from .primes import nearest_prime_power_distance, von_mangoldt, von_mangoldt_rational
from .zeros import ZeroSet

EXACT_MAX_PRIMES = 25
EXACT_MAX_J = 5


@dataclass(frozen=True)
class PowerSumResult:
    x: float
    T: float
    computed: complex
    main_term: float
    envelope: float
    n_zeros: int

    @property
    def residual(self) -> complex:
        return self.computed - self.main_term

    @property
    def ratio(self) -> float:
        """Re(computed) / main_term, NaN when the main term vanishes."""
        return self.computed.real / self.main_term if self.main_term else math.nan


def _lambda_real(x: float) -> float:
    r = round(x)
    return von_mangoldt(r) if abs(x - r) < 1e-12 and r >= 1 else 0.0


def error_envelope(x: float, T: float, C=(1.0, 1.0, 1.0)) -> float:
    """The three-term bound for the Landau-Gonek error, with constants C."""
    c1, c2, c3 = C
    lx = math.log(x)
    t1 = math.sqrt(x) * math.log(x * T) * math.log(math.log(3 * x))
    t2 = lx / math.sqrt(x) * min(T, x / nearest_prime_power_distance(x))
    t3 = math.log(T) / math.sqrt(x) * min(T, 1.0 / lx)
    return c1 * t1 + c2 * t2 + c3 * t3


def _pairwise_sum(values: np.ndarray) -> complex:
    # numpy's add.reduce is pairwise and order-deterministic for contiguous input
    return complex(np.add.reduce(np.ascontiguousarray(values)))


def zero_power_sum(zeros: ZeroSet, x: float, T: float) -> PowerSumResult:
    """sum_{0 < gamma <= T} x^(i gamma) against -(T/2pi) Lambda(x)/sqrt(x).

    For 0 < x < 1 the sum is the conjugate of the one at 1/x, and the main
    term and envelope are taken from 1/x.
    """
    if x <= 0 or x == 1:
        raise DomainError(f"x must be positive and different from 1, got {x}")
    if T > zeros.t_max:
        raise InsufficientZerosError(f"T={T} exceeds the zero set's t_max={zeros.t_max}")
    g = zeros.ordinates[: zeros.count_upto(T)]
    computed = _pairwise_sum(np.exp(1j * g * math.log(x)))
    y = x if x > 1 else 1.0 / x
    lam = _lambda_real(y)
    main = -(T / (2 * math.pi)) * lam / math.sqrt(y) if lam else 0.0
    return PowerSumResult(float(x), float(T), computed, main, error_envelope(y, T), int(g.size))


def _multinomial(exponents) -> int:
    out = math.factorial(sum(exponents))
    for e in exponents:
        out //= math.factorial(e)
    return out


def aj_counts(prime_list: Sequence[int], j: int) -> dict[int, int]:
    """a_j(n): the number of ordered j-tuples of listed primes with product n.

    Walks exponent vectors (e_p) with sum j; each contributes the multinomial
    j! / prod e_p! at n = prod p^e_p.
    """
    if j < 0:
        raise DomainError("j must be >= 0")
    primes = sorted(set(int(p) for p in prime_list))
    if j == 0:
        return {1: 1}
    if not primes:
        return {}
    fact = [math.factorial(i) for i in range(j + 1)]
    last = len(primes) - 1
    out: dict[int, int] = {}

    def walk(i, rem, n, den):
        if rem == 0:
            out[n] = out.get(n, 0) + fact[j] // den
            return
        p = primes[i]
        if i == last:
            n *= p**rem
            out[n] = out.get(n, 0) + fact[j] // (den * fact[rem])
            return
        q = 1
        for e in range(rem + 1):
            walk(i + 1, rem - e, n * q, den * fact[e])
            q *= p

    walk(0, j, 1, 1)
    return out


def _use_exact(prime_list, j) -> bool:
    return len(set(prime_list)) <= EXACT_MAX_PRIMES and j <= EXACT_MAX_J


def psi_power_identity_check(prime_list: Sequence[int], j: int, exact: bool | None = None):
    """(sum_n a_j(n)/n, (sum_p 1/p)^j), as Fractions when exact arithmetic applies.

    The exact path clears denominators with L = (prod p)^j so every term is an
    integer.
    """
    primes = sorted(set(int(p) for p in prime_list))
    exact = _use_exact(primes, j) if exact is None else exact
    counts = aj_counts(primes, j)
    if exact:
        P = math.prod(primes)
        L = P**j
        lhs_num = sum(c * (L // n) for n, c in counts.items())
        rhs_num = sum(P // p for p in primes) ** j
        return Fraction(lhs_num, L), Fraction(rhs_num, L)
    lhs = math.fsum(c / n for n, c in counts.items())
    rhs = math.fsum(1.0 / p for p in primes) ** j
    return lhs, rhs


def _is_squarefree_product(n: int, primes) -> bool:
    return all(n % (p * p) for p in primes)


@dataclass(frozen=True)
class SquarefreeSplit:
    j: int
    squarefree_sum: Fraction | float
    non_squarefree_sum: Fraction | float
    psi: Fraction | float
    bound_ratio: float  # non-squarefree sum / (j^2 psi^(j-2))


def squarefree_split_check(prime_list: Sequence[int], j: int) -> SquarefreeSplit:
    primes = sorted(set(int(p) for p in prime_list))
    if j < 1:
        raise DomainError("j must be >= 1")
    counts = aj_counts(primes, j)
    exact = _use_exact(primes, j)
    conv = Fraction if exact else float
    sf = conv(0)
    nsf = conv(0)
    for n, c in counts.items():
        term = Fraction(c, n) if exact else c / n
        if _is_squarefree_product(n, primes):
            sf += term
        else:
            nsf += term
    psi = sum((Fraction(1, p) for p in primes), Fraction(0)) if exact else math.fsum(1.0 / p for p in primes)
    scale = j * j * psi ** (j - 2) if psi else 0
    ratio = float(nsf / scale) if scale else 0.0
    return SquarefreeSplit(j, sf, nsf, psi, ratio)


def power_coefficients(coeffs: Mapping[int, complex], k: int) -> dict[int, complex]:
    """A_n with (sum_p a_p p^-s)^k = sum_n A_n n^-s."""
    primes = sorted(coeffs)
    out: dict[int, complex] = {}
    for combo in combinations_with_replacement(primes, k):
        cnt = Counter(combo)
        val = _multinomial(cnt.values()) * math.prod(coeffs[p] ** e for p, e in cnt.items())
        n = math.prod(combo)
        out[n] = out.get(n, 0) + val
    return out


@dataclass(frozen=True)
class CoefficientInequality:
    k: int
    lhs: Fraction  # sum_n |A_n|^2 / n
    rhs: Fraction  # k! (sum_p |a_p|^2 / p)^k

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def coefficient_inequality_check(coeffs: Mapping[int, complex], k: int) -> CoefficientInequality:
    """Exact check of sum_n |A_n|^2/n <= k! (sum_p |a_p|^2/p)^k.

    Only |a_p|^2 enters, since |A_n|^2 = a_k(n)^2 prod |a_p|^(2 e_p); each
    |a_p|^2 is converted to an exact Fraction.
    """
    mod2 = {
        p: (Fraction(a.real) ** 2 + Fraction(a.imag) ** 2) if isinstance(a, complex) else Fraction(a) ** 2
        for p, a in coeffs.items()
    }
    lhs = Fraction(0)
    primes = sorted(mod2)
    for combo in combinations_with_replacement(primes, k):
        cnt = Counter(combo)
        a = _multinomial(cnt.values())
        w = Fraction(1)
        for p, e in cnt.items():
            w *= mod2[p] ** e
        lhs += a * a * w / math.prod(combo)
    rhs = math.factorial(k) * sum((m / p for p, m in mod2.items()), Fraction(0)) ** k
    return CoefficientInequality(k, lhs, rhs)


@dataclass(frozen=True)
class BilinearReport:
    lhs: complex
    diagonal_term: complex
    off_diagonal_term: complex
    residual: complex
    error_shape: float
    n_zeros: int

    @property
    def normalized_residual(self) -> float:
        return abs(self.residual) / self.error_shape if self.error_shape else math.inf


BILINEAR_MAX_SUPPORT = 100


def _dirichlet_values(coeffs: Mapping[int, complex], t: np.ndarray) -> np.ndarray:
    ns = np.array(sorted(coeffs), dtype=np.float64)
    c = np.array([coeffs[int(n)] for n in ns], dtype=np.complex128)
    ph = np.multiply.outer(t, np.log(ns))
    return np.exp(-1j * ph) @ c


def bilinear_sum_check(zeros: ZeroSet, coeffs_a: Mapping[int, complex], coeffs_b: Mapping[int, complex], v: float, T: float):
    """Direct sum over zeros of A(gamma+v) conj(B(gamma+v)) against its two main terms."""
    N = max(coeffs_a) if coeffs_a else 1
    M = max(coeffs_b) if coeffs_b else 1
    if max(M, N) > BILINEAR_MAX_SUPPORT:
        raise DomainError(f"supports beyond {BILINEAR_MAX_SUPPORT} are too large for the direct sum")
    if T > zeros.t_max:
        raise InsufficientZerosError(f"T={T} exceeds the zero set's t_max={zeros.t_max}")
    g = zeros.ordinates[: zeros.count_upto(T)]
    t = g + v
    lhs = _pairwise_sum(_dirichlet_values(coeffs_a, t) * np.conj(_dirichlet_values(coeffs_b, t)))
    n_t = g.size
    diag = n_t * sum(a * np.conj(coeffs_b[n]) for n, a in coeffs_a.items() if n in coeffs_b)
    off = 0j
    for n, a in coeffs_a.items():
        for m, b in coeffs_b.items():
            lam = von_mangoldt_rational(m, n) / math.sqrt(m / n) if m > n else 0.0
            lam += von_mangoldt_rational(n, m) / math.sqrt(n / m) if n > m else 0.0
            if lam:
                off += a * np.conj(b) * (m / n) ** (1j * v) * lam
    off *= -T / (2 * math.pi)
    residual = lhs - diag - off
    sa2 = sum(abs(a) ** 2 for a in coeffs_a.values())
    sb2 = sum(abs(b) ** 2 for b in coeffs_b.values())
    cross = 0.0
    for m, b in coeffs_b.items():
        cross += abs(b) / math.sqrt(m) * sum(abs(a) * math.sqrt(n) for n, a in coeffs_a.items() if m < n)
    for n, a in coeffs_a.items():
        cross += abs(a) / math.sqrt(n) * sum(abs(b) * math.sqrt(m) for m, b in coeffs_b.items() if n < m)
    lt = math.log(T)
    shape = max(M, N) * lt**2 * (sa2 + sb2) + max(M, N) * lt * math.log(lt) * cross
    return BilinearReport(complex(lhs), complex(diag), complex(off), complex(residual), shape, int(n_t))


@dataclass(frozen=True)
class MomentBoundReport:
    k: int
    Y: float
    lhs: float
    bound: float
    in_range: bool  # whether Y^(3k) <= T / log T

    @property
    def ratio(self) -> float:
        return self.lhs / self.bound if self.bound else 0.0


def moment_bound_check(zeros: ZeroSet, coeffs_p: Mapping[int, complex], Y: float, k: int, T: float | None = None, enforce_range: bool = True):
    """sum_gamma |sum_{p <= Y} a_p p^(-1/2 - i gamma)|^(2k) against k! N(T) (sum |a_p|^2/p)^k."""
    T = zeros.t_max if T is None else T
    in_range = Y ** (3 * k) <= T / math.log(T)
    if enforce_range and not in_range:
        raise DomainError(f"Y={Y} violates Y^(3k) <= T/log T for k={k}, T={T}")
    g = zeros.ordinates[: zeros.count_upto(T)]
    used = {p: a for p, a in coeffs_p.items() if p <= Y}
    scaled = {p: a / math.sqrt(p) for p, a in used.items()}
    if scaled:
        vals = np.abs(_dirichlet_values(scaled, g)) ** (2 * k)
        lhs = math.fsum(vals.tolist())
    else:
        lhs = 0.0
    bound = math.factorial(k) * g.size * math.fsum(abs(a) ** 2 / p for p, a in used.items()) ** k
    return MomentBoundReport(k, float(Y), lhs, bound, in_range)
