"""Discrete moments over zeros and their predicted main terms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

MAX_BETA_ORDER = 40


def beta_coeff(r: int) -> float:
    """beta_r = r! / (2^r (r/2)!), the Gaussian moment coefficient."""
    if r % 2 or r < 2 or r > MAX_BETA_ORDER:
        raise DomainError(f"beta_r needs an even r in [2, {MAX_BETA_ORDER}], got {r}")
    return math.factorial(r) / (2**r * math.factorial(r // 2))


def empirical_moment(values: Sequence[float], k: int) -> float:
    """sum_i v_i^k, accumulated with fsum."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise DomainError("empirical_moment needs at least one value")
    return math.fsum((v**k).tolist())


def predicted_even_moment(k: int, N_T: float, psi: float) -> tuple[float, float]:
    """(beta_k N_T psi^(k/2), k^2 beta_k N_T psi^((k-4)/2))."""
    if k % 2:
        raise DomainError("predicted_even_moment needs even k")
    b = beta_coeff(k)
    main = b * N_T * psi ** (k / 2)
    err = k * k * b * N_T * psi ** ((k - 4) / 2) if psi > 0 else 0.0
    return main, err


def odd_shift_factor(v: float, X: float) -> float:
    """(sin(2v log X) - sin(v log 2)) / v, with the limit 2 log X - log 2 at v = 0."""
    if v == 0:
        return 2 * math.log(X) - math.log(2)
    return (math.sin(2 * v * math.log(X)) - math.sin(v * math.log(2))) / v


def predicted_odd_moment(k: int, T: float, X: float, v: float, psi: float) -> float:
    """-(beta_{k+1}/pi) * odd_shift_factor(v, X) * T psi^((k-1)/2)."""
    if k % 2 == 0:
        raise DomainError("predicted_odd_moment needs odd k")
    return -(beta_coeff(k + 1) / math.pi) * odd_shift_factor(v, X) * T * psi ** ((k - 1) / 2)


@dataclass(frozen=True)
class MomentReport:
    k: int
    empirical: float
    predicted_main: float
    predicted_error_scale: float
    ratio: float
    n: int


def _ratio(a, b):
    return a / b if b else math.nan


def moment_suite(
    values,
    k_max: int = 6,
    *,
    T: float,
    X: float,
    psi: float,
    v: float = 0.0,
    n_zeros: int | None = None,
) -> list[MomentReport]:
    """Empirical moments k = 1..k_max paired with the prime-polynomial predictions.

    ``values`` is an array of per-zero statistics or a callable returning one.
    ``n_zeros`` (default: the number of values) plays the role of N(T).
    """
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    vals = np.asarray(values() if callable(values) else values, dtype=np.float64)
    n = int(vals.size if n_zeros is None else n_zeros)
    out = []
    for k in range(1, k_max + 1):
        emp = empirical_moment(vals, k)
        if k % 2:
            main = predicted_odd_moment(k, T, X, v, psi)
            # the odd main term carries no separate error scale; next-order size
            err = abs(main) / psi if psi > 0 else 0.0
        else:
            main, err = predicted_even_moment(k, n, psi)
        out.append(MomentReport(k, emp, main, err, _ratio(emp, main), int(vals.size)))
    return out


def statistic_values(statistic: Callable[[float], float], ordinates) -> np.ndarray:
    return np.array([statistic(float(g)) for g in ordinates], dtype=np.float64)
