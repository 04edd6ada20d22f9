"""Zeta on and near the critical line.

Hardy's Z uses the Riemann-Siegel formula with four correction terms above
``RS_MIN_T`` and Euler-Maclaurin below.  Off the line, zeta and zeta' come from
Euler-Maclaurin summation, and log zeta(sigma + it) is obtained by integrating
zeta'/zeta horizontally from sigma = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import loggamma

from .errors import DomainError, NumericalError, PathThroughZeroError

TWO_PI = 2.0 * math.pi
RS_MIN_T = 300.0
# B_2k / (2k)! for k = 1..6
_BERN = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730)
_BERN_COEF = tuple(b / math.factorial(2 * k) for k, b in enumerate(_BERN, start=1))
_CHUNK = 1 << 21


@dataclass(frozen=True)
class CriticalPoint:
    t: float
    z_value: float
    theta: float
    method: str  # "riemann-siegel" or "euler-maclaurin"


@dataclass(frozen=True)
class Shift:
    """The offset z = u + iv paired with a polynomial length X."""

    u: float
    v: float
    X: float
    c_v: float = 1.0

    def __post_init__(self):
        L = math.log(self.X)
        if not 0 < self.u <= 1.0 / L * (1 + 1e-12):
            raise DomainError(f"u must satisfy 0 < u <= 1/log X = {1 / L:.6g}; got {self.u}")
        if abs(self.v) > self.c_v / L * (1 + 1e-12):
            raise DomainError(f"|v| must be <= {self.c_v}/log X = {self.c_v / L:.6g}; got {self.v}")


def riemann_siegel_theta(t, extra_terms: int = 0):
    """Asymptotic expansion of the Riemann-Siegel theta function.

    ``extra_terms`` appends further terms of the series (31/(80640 t^5), ...).
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 2):
        raise DomainError("riemann_siegel_theta requires t >= 2")
    out = t / 2 * np.log(t / TWO_PI) - t / 2 - math.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3)
    extra = (31.0 / 80640, 127.0 / 430080)
    for j in range(min(extra_terms, len(extra))):
        out = out + extra[j] / t ** (5 + 2 * j)
    return out if out.ndim else float(out)


def theta_exact(t):
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi, continuous in t."""
    t = np.asarray(t, dtype=np.float64)
    out = np.imag(loggamma(0.25 + 0.5j * t)) - t / 2 * math.log(math.pi)
    return out if out.ndim else float(out)


@lru_cache(maxsize=1)
def _psi_taylor(order: int = 80) -> np.ndarray:
    """Taylor coefficients in x = p - 1/2 of cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p).

    The quotient is entire; its series is obtained by power-series division at
    high working precision, where the sec factor's cancellations are harmless.
    """
    with mpmath.workdps(60):
        pi = mpmath.pi
        a = -5 * pi / 8
        num = [mpmath.mpf(0)] * order
        den = [mpmath.mpf(0)] * order
        # numerator: -cos(2 pi x^2 + a); denominator: cos(2 pi x)
        rot = (mpmath.cos(a), -mpmath.sin(a), -mpmath.cos(a), mpmath.sin(a))
        for j in range(order // 2):
            num[2 * j] = -((2 * pi) ** j) / mpmath.factorial(j) * rot[j % 4]
            den[2 * j] = (-1) ** j * (2 * pi) ** (2 * j) / mpmath.factorial(2 * j)
        q = [mpmath.mpf(0)] * order
        for n in range(order):
            q[n] = (num[n] - mpmath.fsum(q[k] * den[n - k] for k in range(n))) / den[0]
        return np.array([float(c) for c in q])


@lru_cache(maxsize=1)
def _psi_derivative_coeffs():
    base = _psi_taylor()
    out = [base]
    for _ in range(12):
        out.append(np.polynomial.polynomial.polyder(out[-1]))
    return out


def _rs_remainder(p, w):
    """Gabcke's correction series C0 + C1 w + ... + C4 w^4 for fractional part p."""
    x = p - 0.5
    P = [np.polynomial.polynomial.polyval(x, c) for c in _psi_derivative_coeffs()]
    pi2 = math.pi**2
    c0 = P[0]
    c1 = -P[3] / (96 * pi2)
    c2 = P[2] / (64 * pi2) + P[6] / (18432 * pi2**2)
    c3 = -P[1] / (64 * pi2) - P[5] / (3840 * pi2**2) - P[9] / (5308416 * pi2**3)
    c4 = (
        P[0] / (128 * pi2)
        + 19 * P[4] / (24576 * pi2**2)
        + 11 * P[8] / (5898240 * pi2**3)
        + P[12] / (4076863488 * pi2**4)
    )
    return c0 + w * (c1 + w * (c2 + w * (c3 + w * c4)))


def _hardy_z_rs(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    if t.size == 0:
        return out
    a = np.sqrt(t / TWO_PI)
    N = np.floor(a).astype(np.int64)
    th = riemann_siegel_theta(t)
    # group by N so each block is a dense (points x terms) product
    order = np.argsort(N, kind="stable")
    Ns = N[order]
    bounds = np.flatnonzero(np.diff(Ns)) + 1
    for idx in np.split(order, bounds):
        n_terms = int(N[idx[0]])
        n = np.arange(1, n_terms + 1, dtype=np.float64)
        logn, rsqrt = np.log(n), 1.0 / np.sqrt(n)
        step = max(1, _CHUNK // n_terms)
        for s in range(0, idx.size, step):
            sub = idx[s : s + step]
            phase = th[sub, None] - t[sub, None] * logn[None, :]
            out[sub] = 2.0 * (np.cos(phase) @ rsqrt)
    p = a - N
    w = 1.0 / a
    sign = np.where(N % 2 == 1, 1.0, -1.0)  # (-1)^(N-1)
    return out + sign * np.sqrt(w) * _rs_remainder(p, w)


def _hardy_z_em(t: np.ndarray) -> np.ndarray:
    s = 0.5 + 1j * t
    return np.real(np.exp(1j * theta_exact(t)) * zeta_euler_maclaurin(s))


def hardy_z(t):
    """Hardy's Z(t), real for real t, with |Z(t)| = |zeta(1/2 + it)|.

    Riemann-Siegel is used for t >= RS_MIN_T; below that Euler-Maclaurin times
    exp(i theta) with theta from log Gamma (see ``critical_point`` for the
    method actually used at a given t).
    """
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty_like(arr)
    hi = arr >= RS_MIN_T
    out[hi] = _hardy_z_rs(arr[hi])
    if np.any(~hi):
        out[~hi] = _hardy_z_em(arr[~hi])
    return out if np.ndim(t) else float(out[0])


def critical_point(t: float) -> CriticalPoint:
    method = "riemann-siegel" if t >= RS_MIN_T else "euler-maclaurin"
    th = riemann_siegel_theta(t) if t >= 2 else theta_exact(t)
    return CriticalPoint(float(t), hardy_z(t), float(th), method)


def _default_terms(s: np.ndarray) -> int:
    return int(math.ceil(float(np.max(np.abs(s.imag))))) + 20 if s.size else 20


def _em_core(s: np.ndarray, N: int, derivative: bool):
    n = np.arange(1, N, dtype=np.float64)
    logn = np.log(n)
    val = np.empty(s.shape, dtype=np.complex128)
    der = np.empty(s.shape, dtype=np.complex128) if derivative else None
    step = max(1, _CHUNK // max(N, 1))
    for i in range(0, s.size, step):
        ss = s[i : i + step]
        terms = np.exp(-ss[:, None] * logn[None, :])
        val[i : i + step] = terms.sum(axis=1)
        if derivative:
            der[i : i + step] = -(terms @ logn)
    logN = math.log(N)
    NmS = np.exp(-s * logN)
    head = N * NmS / (s - 1)
    val += head + 0.5 * NmS
    if derivative:
        der += -logN * head - head / (s - 1) - 0.5 * logN * NmS
    poly = s.copy()  # s (s+1) ... (s + 2k - 2)
    dpoly = np.ones_like(s)
    powN = NmS / N  # N^{-s-1}
    for k, coef in enumerate(_BERN_COEF, start=1):
        val += coef * poly * powN
        if derivative:
            der += coef * (dpoly - logN * poly) * powN
        # advance poly by two factors
        a, b = s + (2 * k - 1), s + 2 * k
        dpoly = dpoly * a * b + poly * (a + b)
        poly = poly * a * b
        powN = powN / (N * N)
    return val, der


def zeta_euler_maclaurin(s, terms: int | None = None):
    """zeta(s) by Euler-Maclaurin summation with Bernoulli corrections through B12."""
    arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(arr == 1):
        raise DomainError("zeta has a pole at s = 1")
    if np.any(arr.real <= 0):
        raise DomainError("zeta_euler_maclaurin requires Re s > 0")
    N = terms if terms is not None else _default_terms(arr)
    val, _ = _em_core(arr, int(N), derivative=False)
    return val if np.ndim(s) else complex(val[0])


def zeta_and_derivative(s, terms: int | None = None):
    """(zeta(s), zeta'(s)), the derivative taken term by term in the summation formula."""
    arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(arr == 1):
        raise DomainError("zeta has a pole at s = 1")
    N = terms if terms is not None else _default_terms(arr)
    val, der = _em_core(arr, int(N), derivative=True)
    if np.ndim(s):
        return val, der
    return complex(val[0]), complex(der[0])


_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _path_nodes(delta0: float, floor: float = 1e-7):
    """Gauss-Legendre nodes on sigma in [1/2 + delta0, 2], graded toward the line."""
    lo = max(delta0, floor)
    edges = [lo]
    while edges[-1] < 1.5:
        edges.append(min(edges[-1] * 2.0, 1.5))
    if delta0 < lo:
        edges.insert(0, delta0)
    edges = np.array(edges)
    a, b = edges[:-1], edges[1:]
    half = (b - a) / 2
    x = (a + b)[:, None] / 2 + half[:, None] * _GL_X[None, :]
    w = half[:, None] * _GL_W[None, :]
    return 0.5 + x.ravel(), w.ravel()


def log_zeta_path(sigma0: float, t: float, zero_tol: float = 1e-10) -> complex:
    """log zeta(sigma0 + it) with arg fixed by continuous variation from sigma = 2.

    The arg at sigma = 2 is the principal value (Re zeta(2 + it) > 0).  The
    horizontal integral of Im zeta'/zeta selects the branch; the returned
    imaginary part is the principal arg at the endpoint plus that multiple of 2 pi.
    """
    if sigma0 < 0.5:
        raise DomainError("log_zeta_path requires sigma0 >= 1/2")
    if sigma0 >= 2:
        return complex(np.log(zeta_euler_maclaurin(sigma0 + 1j * t)))
    nodes, weights = _path_nodes(sigma0 - 0.5)
    pts = np.concatenate([nodes, [2.0, sigma0]]) + 1j * t
    z, dz = zeta_and_derivative(pts)
    z_end = z[-1]
    if abs(z_end) < zero_tol:
        raise PathThroughZeroError(f"zeta({sigma0} + {t}i) vanishes to {abs(z_end):.2e}")
    ratio = dz[:-2] / z[:-2]
    integral = complex(np.sum(weights * ratio))
    arg2 = float(np.angle(z[-2]))
    est = arg2 - integral.imag
    principal = float(np.angle(z_end))
    k = round((est - principal) / TWO_PI)
    arg = principal + TWO_PI * k
    if abs(est - arg) > 0.5:
        raise PathThroughZeroError(
            f"arg at t={t} poorly resolved (quadrature {est:.4f} vs branch {arg:.4f}); "
            "the path passes near a zero"
        )
    return complex(math.log(abs(z_end)), arg)


def log_zeta_shifted(gamma: float, shift: Shift) -> complex:
    """log zeta(rho + z) for rho = 1/2 + i gamma and z = u + iv."""
    return log_zeta_path(0.5 + shift.u, gamma + shift.v)


def log_zeta_dirichlet_series(s: complex, table) -> complex:
    """sum_n Lambda(n) / (n^s log n) truncated to prime powers within the sieve."""
    if s.real <= 1:
        raise DomainError("Dirichlet series for log zeta converges only for Re s > 1")
    total = 0j
    logp = np.log(table.primes.astype(np.float64))
    for k in range(1, 64):
        terms = np.exp(-k * s * logp) / k
        contrib = complex(terms.sum())
        total += contrib
        if abs(contrib) < 1e-18:
            break
    return total


def _match_zero(gamma: float, zeros, tol: float = 1e-9) -> float:
    ords = zeros.ordinates
    i = int(np.searchsorted(ords, gamma))
    for j in (i - 1, i):
        if 0 <= j < ords.size and abs(ords[j] - gamma) <= max(tol, 1e-12 * gamma):
            return float(ords[j])
    raise DomainError(f"{gamma} is not an ordinate of the zero set")


def hardy_z_derivative(t, h: float = 1e-3):
    """Z'(t) by Richardson-extrapolated central differences (steps h and h/2)."""
    t = np.asarray(t, dtype=np.float64)
    vals = hardy_z(np.concatenate([np.ravel(t) + d for d in (h, -h, h / 2, -h / 2)]))
    m = np.ravel(t).size
    d1 = (vals[:m] - vals[m : 2 * m]) / (2 * h)
    d2 = (vals[2 * m : 3 * m] - vals[3 * m :]) / h
    out = (4 * d2 - d1) / 3
    return out.reshape(t.shape) if t.ndim else float(out[0])


def zeta_prime_at_zero(gamma: float, zeros) -> float:
    """|zeta'(1/2 + i gamma)| = |Z'(gamma)| at a zero ordinate gamma."""
    g = _match_zero(gamma, zeros)
    return abs(hardy_z_derivative(g))


def zeta_prime_at_zeros(ordinates) -> np.ndarray:
    """Batch |Z'(gamma)| for ordinates already known to be zeros."""
    return np.abs(hardy_z_derivative(np.asarray(ordinates, dtype=np.float64)))


def check_path_feasible(t: float, max_t: float):
    if t > max_t:
        raise NumericalError(f"off-line evaluation at height {t} exceeds the configured limit {max_t}")
