"""The prime Dirichlet polynomial P_X(t), the mean shift M_X and the error terms r1..r4."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientSieveError
from .primes import PrimeTable, prime_powers_upto, weight_w_array
from .zeros import ZeroSet, multiplicity_at, nearest_gaps
from .zeta import Shift, zeta_prime_at_zero, zeta_prime_at_zeros

_ROWS = 2048
R3_CUT = 40.0  # sigma_cut - 1/2 = R3_CUT / log X


@dataclass(frozen=True)
class PolyConfig:
    X: float
    table: PrimeTable

    def __post_init__(self):
        if self.X < 2:
            raise DomainError(f"X must be >= 2, got {self.X}")
        if self.table.limit < self.X * self.X:
            raise InsufficientSieveError(
                f"sieve limit {self.table.limit} is below X^2 = {self.X * self.X:g}"
            )

    @property
    def log_x(self) -> float:
        return math.log(self.X)

    @property
    def sigma1(self) -> float:
        return 0.5 + 4.0 / math.log(self.X)

    @property
    def primes(self) -> np.ndarray:
        return self.table.primes_upto(self.X * self.X)


@dataclass(frozen=True)
class RemainderBundle:
    r1: float
    r2: float
    r3: float
    r4: float
    e_term: float

    @property
    def total(self) -> float:
        return self.r1 + self.r2 + self.r3 + self.r4


def _phase_sum(t, logs, coeffs):
    """sum_j coeffs[j] * exp(-i t logs[j]) for every t, in fixed row blocks."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty(t.size, dtype=np.complex128)
    for i in range(0, t.size, _ROWS):
        ph = np.multiply.outer(t[i : i + _ROWS], logs)
        out[i : i + _ROWS] = (np.cos(ph) * coeffs).sum(axis=1) - 1j * (np.sin(ph) * coeffs).sum(axis=1)
    return out


def eval_prime_poly(cfg: PolyConfig, t):
    """P_X(t) = sum_{p <= X^2} p^(-1/2 - it); accepts a scalar or an array of t."""
    p = cfg.primes.astype(np.float64)
    out = _phase_sum(t, np.log(p), p**-0.5)
    return out if np.ndim(t) else complex(out[0])


def eval_prime_poly_zeros(cfg: PolyConfig, zeros: ZeroSet, v: float = 0.0) -> np.ndarray:
    return eval_prime_poly(cfg, zeros.ordinates + v)


def mean_shift(multiplicity: int, u: float, X: float) -> float:
    """M_X = m (log(e u log X / 4) - u log X / 4)."""
    if u <= 0:
        raise DomainError(f"u must be positive, got {u}")
    if multiplicity == 0:
        return 0.0
    L = math.log(X)
    return multiplicity * (math.log(math.e * u * L / 4) - u * L / 4)


def log_plus(x):
    return np.maximum(np.log(x), 0.0)


def _e_terms(cfg: PolyConfig, t: np.ndarray) -> np.ndarray:
    vals, bases, _ = prime_powers_upto(cfg.table, cfg.X * cfg.X)
    lam_x = np.log(bases.astype(np.float64)) * weight_w_array(vals, cfg.X)
    coeff = lam_x * vals.astype(np.float64) ** (-cfg.sigma1)
    return np.abs(_phase_sum(t, np.log(vals.astype(np.float64)), coeff)) + np.log(t)


def _r3(cfg: PolyConfig, t: np.ndarray, panels: int, nodes: int) -> np.ndarray:
    """(1/log X) int_{1/2}^inf X^(1/2 - sigma) |sum_p Lambda_X(p) log(Xp) p^(-sigma-it)| d sigma."""
    p = cfg.primes.astype(np.float64)
    L = cfg.log_x
    logp = np.log(p)
    c = logp * weight_w_array(p, cfg.X) * np.log(cfg.X * p)
    y_cut = R3_CUT / L
    edges = np.linspace(0.0, y_cut, panels + 1)
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    half = np.diff(edges) / 2
    y = ((edges[:-1] + edges[1:]) / 2)[:, None] + half[:, None] * gx[None, :]
    w = (half[:, None] * gw[None, :]).ravel()
    y = y.ravel()
    # A[y, p] = c_p p^(-1/2 - y) X^(-y); the t dependence is exp(-i t log p)
    A = c[None, :] * np.exp(-(0.5 + y)[:, None] * logp[None, :]) * np.exp(-y * L)[:, None]
    out = np.empty(t.size)
    for i in range(0, t.size, 512):
        ph = np.multiply.outer(logp, t[i : i + 512])
        S = A @ np.cos(ph) - 1j * (A @ np.sin(ph))
        out[i : i + 512] = w @ np.abs(S)
    tail = math.exp(-y_cut * L) * float(np.sum(c * p ** (-(0.5 + y_cut)))) / L
    return (out + tail) / L


def remainders(cfg: PolyConfig, t, eta, r3_panels: int = 24, r3_nodes: int = 16, replace_r4=False):
    """Error magnitudes r1..r4 and E(X, t); vectorised over t and eta.

    With ``replace_r4=True`` the r4 slot carries E/log X (no gap factor),
    which is the bundle used for arg zeta.
    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    eta = np.broadcast_to(np.asarray(eta, dtype=np.float64), t.shape)
    if np.any(eta <= 0):
        raise DomainError("eta must be positive")
    if np.any(t < 2):
        raise DomainError("remainders require t >= 2")
    X, L = cfg.X, cfg.log_x
    p = cfg.primes.astype(np.float64)
    logp = np.log(p)
    high = p > X
    r1 = np.abs(_phase_sum(t, logp[high], (1.0 - weight_w_array(p[high], X)) * p[high] ** -0.5))
    low = p <= X
    r2 = np.abs(_phase_sum(t, 2 * logp[low], weight_w_array(p[low] ** 2, X) / p[low]))
    r3 = _r3(cfg, t, r3_panels, r3_nodes)
    e = _e_terms(cfg, t)
    if replace_r4:
        r4 = e / L
    else:
        r4 = (1.0 + log_plus(1.0 / (eta * L))) * e / L
    if scalar:
        return RemainderBundle(float(r1[0]), float(r2[0]), float(r3[0]), float(r4[0]), float(e[0]))
    return r1, r2, r3, r4, e


def smoothed_log_zeta_sum(cfg: PolyConfig, t):
    """sum_{n <= X^2} Lambda_X(n) / (n^(sigma1 + it) log n)."""
    vals, bases, _ = prime_powers_upto(cfg.table, cfg.X * cfg.X)
    v = vals.astype(np.float64)
    lam_x = np.log(bases.astype(np.float64)) * weight_w_array(v, cfg.X)
    out = _phase_sum(t, np.log(v), lam_x * v ** (-cfg.sigma1) / np.log(v))
    return out if np.ndim(t) else complex(out[0])


def approx_log_modulus(cfg: PolyConfig, gamma: float, shift: Shift, multiplicity: int, zeros: ZeroSet):
    """(M_X + Re P_X(gamma + v), remainder bundle at gamma + v)."""
    t = gamma + shift.v
    approx = mean_shift(multiplicity, shift.u, cfg.X) + eval_prime_poly(cfg, t).real
    eta = float(nearest_gaps(zeros, np.array([t]))[0])
    return approx, remainders(cfg, t, eta)


def approx_argument(cfg: PolyConfig, gamma: float, shift: Shift):
    """(Im P_X(gamma + v), bundle with r4 replaced by E/log X)."""
    t = gamma + shift.v
    return eval_prime_poly(cfg, t).imag, remainders(cfg, t, 1.0, replace_r4=True)


def default_multiplicity(zeros: ZeroSet, gamma: float, v: float) -> int:
    return multiplicity_at(zeros, gamma + v)


def zeta_prime_statistic(gamma: float, zeros: ZeroSet, X: float) -> float:
    """log|zeta'(rho)| - log(e log X / 4) for a simple zero rho = 1/2 + i gamma."""
    return math.log(zeta_prime_at_zero(gamma, zeros)) - math.log(math.e * math.log(X) / 4)


def zeta_prime_statistic_log_t(gamma: float, zeros: ZeroSet, T: float) -> float:
    """log(|zeta'(rho)| / log T)."""
    return math.log(zeta_prime_at_zero(gamma, zeros)) - math.log(math.log(T))


def zeta_prime_statistics(ordinates, X: float | None = None, T: float | None = None) -> np.ndarray:
    """Batch form: subtract log(e log X / 4) when X is given, log log T when T is given."""
    logs = np.log(zeta_prime_at_zeros(ordinates))
    if X is not None:
        return logs - math.log(math.e * math.log(X) / 4)
    if T is not None:
        return logs - math.log(math.log(T))
    return logs
