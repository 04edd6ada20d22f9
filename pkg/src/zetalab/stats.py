"""Distribution comparisons against the standard Gaussian, and S(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .dirichlet import PolyConfig, eval_prime_poly, mean_shift, zeta_prime_statistics
from .errors import DomainError, PathThroughZeroError
from .primes import prime_reciprocal_sum
from .zeros import ZeroSet, multiplicity_at
from .zeta import Shift, log_zeta_path, log_zeta_shifted

DEFAULT_INTERVALS = (
    (-3.0, -2.0), (-2.0, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, 2.0), (2.0, 3.0),
    (-1.0, 1.0), (-2.0, 2.0),
)
STATISTICS = ("re-poly", "im-poly", "log-zeta", "log-zeta-prime")
LOG_ZETA_SUBSET = 2000
LOG_ZETA_PRIME_SUBSET = 2000


def gaussian_cdf(x):
    """Standard normal CDF; scalar in, float out, arrays broadcast."""
    out = ndtr(np.asarray(x, dtype=np.float64))
    return float(out) if np.ndim(x) == 0 else out


def loglog_scale(T: float) -> float:
    if T <= math.e**math.e:
        raise DomainError(f"T must exceed e^e so that log log T > 1, got {T}")
    return math.sqrt(0.5 * math.log(math.log(T)))


def normalize_statistic(values, T: float, scale: float | None = None) -> np.ndarray:
    """values / sqrt(log log T / 2), or values / scale when a scale is supplied."""
    s = loglog_scale(T) if scale is None else scale
    return np.asarray(values, dtype=np.float64) / s


def ks_distance(values, reference_cdf=gaussian_cdf) -> float:
    """sup_x |F_n(x) - F(x)|, attained at the sample points."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    if n == 0:
        raise DomainError("ks_distance needs at least one value")
    f = np.asarray(reference_cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def empirical_cdf(values):
    """(sorted values, F_n at each): right-continuous, stepping by 1/n."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    return x, np.arange(1, x.size + 1) / x.size


def interval_mass(values, a: float, b: float) -> float:
    v = np.asarray(values, dtype=np.float64)
    return float(np.count_nonzero((v >= a) & (v <= b)) / v.size)


@dataclass(frozen=True)
class DistributionReport:
    statistic_name: str
    n: int
    normalization: dict
    ks_distance: float
    interval_probs: list  # (a, b, empirical, gaussian, difference)
    histogram: dict = field(default_factory=dict)
    notes: str = ""

    def interval(self, a: float, b: float) -> tuple:
        for row in self.interval_probs:
            if row[0] == a and row[1] == b:
                return row
        raise KeyError((a, b))


def clt_report(
    values,
    statistic_name: str,
    T: float,
    psi: float | None = None,
    intervals=DEFAULT_INTERVALS,
    scale: str = "loglog",
    center: bool = False,
    bins: int = 40,
    notes: str = "",
) -> DistributionReport:
    """Compare values / scale with N(0, 1).

    ``scale`` is "loglog" for sqrt(log log T / 2) or "psi" for sqrt(psi / 2);
    both are recorded.  ``center`` subtracts the sample mean first.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise DomainError("clt_report needs at least one value")
    s_ll = loglog_scale(T)
    s_psi = math.sqrt(psi / 2) if psi else None
    if scale == "loglog":
        s = s_ll
    elif scale == "psi":
        if s_psi is None:
            raise DomainError("scale='psi' needs psi")
        s = s_psi
    else:
        raise DomainError(f"unknown scale {scale!r}")
    offset = float(np.mean(v)) if center else 0.0
    z = (v - offset) / s
    rows = []
    for a, b in intervals:
        emp = interval_mass(z, a, b)
        ga = gaussian_cdf(b) - gaussian_cdf(a)
        rows.append((float(a), float(b), emp, ga, emp - ga))
    counts, edges = np.histogram(z, bins=bins, range=(-4.0, 4.0))
    inside = int(counts.sum())
    hist = {
        "edges": edges.tolist(),
        "mass": (counts / v.size).tolist(),
        "outside_mass": (v.size - inside) / v.size,
    }
    norm = {
        "center": f"sample mean {offset!r} subtracted" if center else "none",
        "scale": s,
        "scale_kind": scale,
        "scale_loglog": s_ll,
        "scale_psi": s_psi,
        "mean": float(np.mean(z)),
        "sd": float(np.std(z)),
    }
    return DistributionReport(statistic_name, int(v.size), norm, ks_distance(z), rows, hist, notes)


def statistic_values(
    selector: str,
    zeros: ZeroSet,
    cfg: PolyConfig,
    shift: Shift | None = None,
    subset: int | None = None,
) -> tuple[np.ndarray, float]:
    """Per-zero statistic and the prime sum used with it.

    Returns (values, psi) where psi = sum_{p <= X^2} 1/p.  The log-zeta
    statistics run on the first ``subset`` zeros only.
    """
    psi = prime_reciprocal_sum(cfg.table, cfg.X * cfg.X)
    v = 0.0 if shift is None else shift.v
    g = zeros.ordinates
    if selector in ("re-poly", "im-poly"):
        if subset:
            g = g[:subset]
        p = eval_prime_poly(cfg, g + v)
        return (p.real if selector == "re-poly" else p.imag), psi
    if selector == "log-zeta":
        if shift is None:
            raise DomainError("the log-zeta statistic needs a shift with u > 0")
        g = g[: subset or LOG_ZETA_SUBSET]
        out = np.empty(g.size)
        for i, gamma in enumerate(g.tolist()):
            m = multiplicity_at(zeros, gamma + shift.v)
            out[i] = log_zeta_shifted(gamma, shift).real - mean_shift(m, shift.u, cfg.X)
        return out, psi
    if selector == "log-zeta-prime":
        g = g[: subset or LOG_ZETA_PRIME_SUBSET]
        return zeta_prime_statistics(g, T=zeros.t_max), psi
    raise DomainError(f"unknown statistic {selector!r}; choose from {STATISTICS}")


def s_of_t(T: float) -> float:
    """S(T) = arg zeta(1/2 + iT) / pi, by continuous variation from sigma = 2."""
    try:
        return log_zeta_path(0.5, T).imag / math.pi
    except PathThroughZeroError as exc:
        raise PathThroughZeroError(f"{exc}; perturb T away from the zero ordinate") from exc
