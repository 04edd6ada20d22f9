"""Random Euler-product model: Re sum_p e(theta_p) p^(-1/2-iv) with independent uniform phases."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import mpmath
import numpy as np

from .errors import DomainError
from .primes import PrimeTable, is_prime

K_CAP = 64
OMEGA_CAP = 25.0
BESSEL_MAX_ORDER = 64
BESSEL_MAX_ARG = 120.0  # 2 pi * OMEGA_CAP / sqrt(2) is about 111
_DOUBLE_SERIES_MAX = 2.0
_CHUNK = 1 << 15  # samples per RNG stream


@dataclass(frozen=True)
class RandomModel:
    table: PrimeTable
    X: float
    v: float = 0.0
    rng_seed: int = 0
    primes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.rng_seed < 2**64:
            raise DomainError("rng_seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "primes", self.table.primes_upto(self.X * self.X))

    @cached_property
    def psi(self) -> float:
        return math.fsum((1.0 / self.primes.astype(np.float64)).tolist())

    def default_parameters(self, psi_T: float | None = None) -> tuple[float, int]:
        """(Omega, K) = (Psi(T)^2, 2 floor(Psi(T)^6)), each capped."""
        p = self.psi if psi_T is None else psi_T
        return min(p * p, OMEGA_CAP), min(2 * math.floor(p**6), K_CAP)


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def sample_phases(model: RandomModel, n_samples: int):
    """Yield (start, theta) chunks with theta of shape (rows, n_primes)."""
    n_p = model.primes.size
    for i, start in enumerate(range(0, n_samples, _CHUNK)):
        rows = min(_CHUNK, n_samples - start)
        yield start, _stream(model.rng_seed, i).random((rows, n_p))


def sample_real_poly(model: RandomModel, n_samples: int) -> np.ndarray:
    """Samples of sum_p cos(2 pi theta_p - v log p)/sqrt(p); reproducible from rng_seed."""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    p = model.primes.astype(np.float64)
    shift = model.v * np.log(p)
    amp = p**-0.5
    out = np.empty(n_samples)
    for start, theta in sample_phases(model, n_samples):
        out[start : start + theta.shape[0]] = np.cos(2 * math.pi * theta - shift) @ amp
    return out


def _cos_even_moment(j: int) -> float:
    """E[cos^(2j)] for a uniform phase."""
    return math.comb(2 * j, j) / 4**j


def exact_even_moment(model: RandomModel, k: int) -> float:
    """E[(Re P_v)^k] from independence, for k in {2, 4, 6, 8}.

    Moments of a sum of independent terms are built one prime at a time:
    E[(A+B)^k] = sum_i C(k, i) E[A^i] E[B^(k-i)], with only even orders nonzero.
    """
    if k not in (2, 4, 6, 8):
        raise DomainError(f"exact_even_moment supports k in (2, 4, 6, 8), got {k}")
    half = k // 2
    acc = [1.0] + [0.0] * half  # acc[j] = E[S^(2j)]
    cm = [_cos_even_moment(j) for j in range(half + 1)]
    binom = [[math.comb(2 * a, 2 * b) for b in range(half + 1)] for a in range(half + 1)]
    for p in model.primes.tolist():
        term = [cm[j] / p**j for j in range(half + 1)]
        acc = [
            math.fsum(binom[a][b] * acc[a - b] * term[b] for b in range(a + 1))
            for a in range(half + 1)
        ]
    return acc[half]


def _bessel_series_double(ell: int, x: float) -> float:
    h = x / 2
    term = h**ell / math.factorial(ell)
    total = term
    j = 0
    while abs(term) > 1e-17 * abs(total) or j < 2:
        j += 1
        term *= -h * h / (j * (ell + j))
        total += term
        if term == 0.0:
            break
    return total


def _bessel_series_mp(ell: int, x: float) -> float:
    # terms grow to about e^|x| before cancelling, so carry that many extra digits
    dps = 20 + int(abs(x) / math.log(10)) + 5
    with mpmath.workdps(dps):
        h = mpmath.mpf(x) / 2
        term = h**ell / mpmath.factorial(ell)
        total = term
        eps = mpmath.mpf(10) ** (-20)
        j = 0
        while True:
            j += 1
            term *= -h * h / (j * (ell + j))
            total += term
            if j > abs(x) and abs(term) <= eps * max(abs(total), mpmath.mpf(10) ** (-300)):
                break
        return float(total)


def bessel_j(ell: int, x: float) -> float:
    """J_ell(x) from its power series, to about 1e-12 relative accuracy."""
    if not (0 <= ell <= BESSEL_MAX_ORDER) or int(ell) != ell:
        raise DomainError(f"Bessel order must be an integer in [0, {BESSEL_MAX_ORDER}], got {ell}")
    if not abs(x) <= BESSEL_MAX_ARG:
        raise DomainError(f"|x| must be <= {BESSEL_MAX_ARG}, got {x}")
    if x == 0:
        return 1.0 if ell == 0 else 0.0
    if abs(x) <= _DOUBLE_SERIES_MAX:
        return _bessel_series_double(int(ell), float(x))
    return _bessel_series_mp(int(ell), float(x))


def bessel_small_estimate(ell: int, z: float) -> float:
    """(z^ell / ell!) e^(-z^2/(ell+1)), the small-argument form of J_ell(2z)."""
    return z**ell / math.factorial(ell) * math.exp(-z * z / (ell + 1))


def _j0_product(model: RandomModel, omega: float, skip: int | None = None) -> float:
    out = 1.0
    for p in model.primes.tolist():
        if p != skip:
            out *= bessel_j(0, 2 * math.pi * omega / math.sqrt(p))
    return out


def _check_omega(omega):
    if not 0 <= omega <= OMEGA_CAP:
        raise DomainError(f"omega must lie in [0, {OMEGA_CAP}], got {omega}")


def analytic_char_fn(model: RandomModel, omega: float) -> complex:
    """E[exp(2 pi i omega Re P_v)] = prod_p J_0(2 pi omega / sqrt p)."""
    _check_omega(omega)
    return complex(_j0_product(model, omega), 0.0)


def twisted_char_fn(model: RandomModel, q: int, ell: int, omega: float) -> tuple[complex, complex]:
    """(J(q, ell, omega), J(q, -ell, omega)), the characteristic function twisted by e(+-ell theta_q)."""
    _check_omega(omega)
    if not is_prime(q) or q > model.X * model.X:
        raise DomainError(f"q must be a prime <= X^2, got {q}")
    if not 1 <= ell <= K_CAP:
        raise DomainError(f"ell must lie in [1, {K_CAP}], got {ell}")
    base = bessel_j(ell, 2 * math.pi * omega / math.sqrt(q)) * _j0_product(model, omega, skip=q)
    phase = model.v * math.log(q)
    plus = (1j * complex(math.cos(phase), math.sin(phase))) ** ell * base
    minus = (1j * complex(math.cos(phase), -math.sin(phase))) ** ell * base
    return plus, minus


@dataclass(frozen=True)
class DecayReport:
    omega: np.ndarray
    char_abs: np.ndarray
    psi: float
    c_fit: float  # largest c with |phi(omega)| <= exp(-c psi omega^2) on the grid
    violations: list  # omegas where |phi| > 1 (no c >= 0 works)


def decay_bound_check(model: RandomModel, omega_grid) -> DecayReport:
    w = np.asarray(omega_grid, dtype=np.float64)
    if w.size == 0 or w.min() < 0 or w.max() > 3:
        raise DomainError("omega grid must be nonempty and lie in [0, 3]")
    vals = np.array([abs(analytic_char_fn(model, float(o))) for o in w])
    pos = w > 0
    with np.errstate(divide="ignore"):
        cs = -np.log(vals[pos]) / (model.psi * w[pos] ** 2)
    c_fit = float(cs.min()) if cs.size else math.inf
    violations = [float(o) for o, a in zip(w, vals) if a > 1 + 1e-15]
    return DecayReport(w, vals, model.psi, c_fit, violations)


@dataclass(frozen=True)
class MCEstimate:
    value: complex
    std_error: complex  # real and imaginary standard errors packed as a complex


def mc_moment(samples: np.ndarray, k: int) -> MCEstimate:
    s = samples**k
    return MCEstimate(complex(s.mean()), complex(s.std(ddof=1) / math.sqrt(s.size)))


def mc_char_fn(samples: np.ndarray, omega: float) -> MCEstimate:
    ph = 2 * math.pi * omega * samples
    c, s = np.cos(ph), np.sin(ph)
    n = math.sqrt(samples.size)
    return MCEstimate(complex(c.mean(), s.mean()), complex(c.std(ddof=1) / n, s.std(ddof=1) / n))


def mc_twisted_char_fn(model: RandomModel, q: int, ell: int, omega: float, n_samples: int):
    """MC estimates of J(q, +ell, omega) and J(q, -ell, omega) from the defining integral."""
    p = model.primes.astype(np.float64)
    qi = int(np.searchsorted(model.primes, q))
    if qi >= p.size or model.primes[qi] != q:
        raise DomainError(f"{q} is not among the model primes")
    shift = model.v * np.log(p)
    amp = p**-0.5
    parts = {1: [], -1: []}
    for _, theta in sample_phases(model, n_samples):
        re_p = np.cos(2 * math.pi * theta - shift) @ amp
        for sgn in (1, -1):
            parts[sgn].append(np.exp(2j * math.pi * (omega * re_p + sgn * ell * theta[:, qi])))
    out = []
    for sgn in (1, -1):
        z = np.concatenate(parts[sgn])
        n = math.sqrt(z.size)
        out.append(MCEstimate(complex(z.mean()), complex(z.real.std(ddof=1) / n, z.imag.std(ddof=1) / n)))
    return tuple(out)
