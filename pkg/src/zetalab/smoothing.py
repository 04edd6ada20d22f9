"""Beurling-Selberg smoothing: G(u), F_Omega(x), and band-limited sgn and indicator approximations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError

_PANEL_NODES = 16
_GL = np.polynomial.legendre.leggauss(_PANEL_NODES)
QUAD_TOL = 1e-10
ENVELOPE_FLOOR = 1e-8  # below this the ratio is not formed; |sgn - F| is checked absolutely


@dataclass(frozen=True)
class SmoothingConfig:
    omega_cap: float
    quadrature_nodes: int = 128

    def __post_init__(self):
        if not self.omega_cap > 0:
            raise DomainError(f"omega_cap must be positive, got {self.omega_cap}")
        if self.quadrature_nodes < 64:
            raise DomainError(f"quadrature_nodes must be >= 64, got {self.quadrature_nodes}")


def _g(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    lo = u <= 0.5
    ul = u[lo]
    # u cot(pi u) -> 1/pi at 0
    with np.errstate(invalid="ignore", divide="ignore"):
        ucot = np.where(ul > 0, ul / np.tan(math.pi * ul), 1 / math.pi)
    out[lo] = 2 * ul / math.pi + 2 * (1 - ul) * ucot
    uh = u[~lo]
    w = 1 - uh
    # cot(pi u) = -cot(pi w); w cot(pi w) -> 1/pi at u = 1
    with np.errstate(invalid="ignore", divide="ignore"):
        wcot = np.where(w > 0, w / np.tan(math.pi * w), 1 / math.pi)
    out[~lo] = 2 * uh / math.pi - 2 * uh * wcot
    return out


def g_function(u: float) -> float:
    """G(u) = 2u/pi + 2u(1-u)cot(pi u) on [0, 1], with G(0) = 2/pi and G(1) = 0."""
    if not 0 <= u <= 1:
        raise DomainError(f"G is defined on [0, 1], got {u}")
    return float(_g(np.array([u]))[0])


def _integral(omega: float, x: float, panels: int) -> float:
    gx, gw = _GL
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = np.diff(edges) / 2
    u = (((edges[:-1] + edges[1:]) / 2)[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    return float(w @ (_g(u) * np.sin(2 * math.pi * omega * x * u) / u))


def beurling_f(cfg: SmoothingConfig, x: float) -> float:
    """F_Omega(x) = int_0^1 G(u) sin(2 pi Omega x u) du / u.

    Composite Gauss-Legendre with panels scaled to the oscillation count,
    accepted once doubling the panels moves the value by less than QUAD_TOL.
    """
    if not math.isfinite(x):
        raise DomainError("x must be finite")
    if x == 0:
        return 0.0
    if x < 0:
        return -beurling_f(cfg, -x)
    panels = max(cfg.quadrature_nodes // _PANEL_NODES, math.ceil(2 * cfg.omega_cap * x) + 4)
    prev = _integral(cfg.omega_cap, x, panels)
    for _ in range(6):
        panels *= 2
        cur = _integral(cfg.omega_cap, x, panels)
        if abs(cur - prev) < QUAD_TOL:
            return cur
        prev = cur
    raise QuadratureError(abs(cur - prev), QUAD_TOL)


def sgn(x: float) -> float:
    return float(np.sign(x))


def sinc2_envelope(omega: float, x):
    """sin^2(pi Omega x) / (pi Omega x)^2, equal to 1 at x = 0."""
    y = math.pi * omega * np.asarray(x, dtype=np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(y == 0, 1.0, np.sin(y) ** 2 / np.where(y == 0, 1.0, y) ** 2)


@dataclass(frozen=True)
class SgnErrorReport:
    omega: float
    x: np.ndarray
    f_values: np.ndarray
    abs_error: np.ndarray
    envelope: np.ndarray
    c_fit: float  # max |sgn - F| / envelope where the envelope exceeds ENVELOPE_FLOOR
    max_error_off_envelope: float  # max |sgn - F| where the envelope is below the floor


def sgn_error(cfg: SmoothingConfig, x_grid) -> SgnErrorReport:
    x = np.asarray(x_grid, dtype=np.float64)
    x = x[x != 0]  # sgn(0) = 0 = F(0) holds exactly and carries no information
    f = np.array([beurling_f(cfg, float(v)) for v in x])
    err = np.abs(np.sign(x) - f)
    env = sinc2_envelope(cfg.omega_cap, x)
    big = env > ENVELOPE_FLOOR
    c_fit = float(np.max(err[big] / env[big])) if big.any() else 0.0
    off = float(np.max(err[~big])) if (~big).any() else 0.0
    return SgnErrorReport(cfg.omega_cap, x, f, err, env, c_fit, off)


def indicator_approx(cfg: SmoothingConfig, a: float, b: float, x: float) -> tuple[float, float]:
    """(F(x-a)/2 - F(x-b)/2, the summed sinc^2 envelopes at x-a and x-b)."""
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    value = 0.5 * beurling_f(cfg, x - a) - 0.5 * beurling_f(cfg, x - b)
    env = float(sinc2_envelope(cfg.omega_cap, x - a) + sinc2_envelope(cfg.omega_cap, x - b))
    return value, env


def indicator_sgn(a: float, b: float, x: float) -> float:
    """1_[a,b](x) as sgn(x-a)/2 - sgn(x-b)/2 plus half-weights at the endpoints."""
    val = 0.5 * sgn(x - a) - 0.5 * sgn(x - b)
    return val + 0.5 * (x == a) + 0.5 * (x == b)
