"""Zero ordinates: computing, persisting, and gap / pair statistics."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DataValidationError,
    DomainError,
    IncompleteZeroSetError,
    ZeroFileParseError,
)
from .zeta import TWO_PI, hardy_z

MATCH_TOL = 1e-9
CHECK_BLOCK = 1000
_GRID_START = 10.0


@dataclass(frozen=True)
class ZeroSet:
    ordinates: np.ndarray
    t_max: float
    source: str = "computed"

    def __post_init__(self):
        ords = np.ascontiguousarray(self.ordinates, dtype=np.float64)
        if ords.size and (np.any(np.diff(ords) <= 0) or ords[0] <= 0 or ords[-1] > self.t_max):
            raise DataValidationError("ordinates must be strictly increasing within (0, t_max]")
        ords.setflags(write=False)
        object.__setattr__(self, "ordinates", ords)

    def __len__(self):
        return int(self.ordinates.size)

    def count_upto(self, T: float) -> int:
        return int(np.searchsorted(self.ordinates, T, side="right"))

    def restrict(self, T: float) -> "ZeroSet":
        if T > self.t_max:
            raise DomainError(f"cannot restrict to T={T} beyond t_max={self.t_max}")
        return ZeroSet(self.ordinates[: self.count_upto(T)], float(T), self.source)

    def head(self, n: int) -> "ZeroSet":
        ords = self.ordinates[:n]
        t_max = float(ords[-1]) if n < len(self) and ords.size else self.t_max
        return ZeroSet(ords, t_max, self.source)


def rv_mangoldt_count(T):
    """Smooth part of N(T): (T/2pi) log(T/2pi) - T/2pi + 7/8."""
    T = np.asarray(T, dtype=np.float64)
    if np.any(T < 2):
        raise DomainError("rv_mangoldt_count requires T >= 2")
    x = T / TWO_PI
    out = x * np.log(x) - x + 0.875
    return out if out.ndim else float(out)


def _grid_spacing(t):
    gap = TWO_PI / np.log(np.maximum(t, 20.0) / TWO_PI)
    return np.minimum(gap / 5.0, 0.5)


def _grid(a: float, b: float, refine: float = 1.0) -> np.ndarray:
    """Sample points on [a, b] finer than a fifth of the local mean zero gap."""
    pieces = []
    lo = a
    while lo < b:
        hi = min(b, lo + 50.0)
        h = float(_grid_spacing(hi)) / refine
        n = max(2, int(math.ceil((hi - lo) / h)) + 1)
        pts = np.linspace(lo, hi, n)
        pieces.append(pts if not pieces else pts[1:])
        lo = hi
    return np.concatenate(pieces) if pieces else np.array([a, b])


def _eval_z(t: np.ndarray, threads: int) -> np.ndarray:
    if threads <= 1 or t.size < 20000:
        return hardy_z(t)
    parts = np.array_split(t, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(hardy_z, parts)))


def _sign_brackets(t, z):
    s = np.signbit(z)
    idx = np.flatnonzero(s[:-1] != s[1:])
    return t[idx], t[idx + 1], z[idx], z[idx + 1]


def _dip_brackets(t, z, threads, levels=3, sub=24):
    """Brackets hidden inside same-sign dips of |Z| (close zero pairs)."""
    s = np.signbit(z)
    a = np.abs(z)
    k = np.arange(1, z.size - 1)
    same = (s[k - 1] == s[k]) & (s[k] == s[k + 1])
    dip = same & (a[k] < a[k - 1]) & (a[k] <= a[k + 1])
    centers = k[dip]
    if centers.size == 0:
        return [np.empty(0)] * 4
    lo = t[centers - 1]
    hi = t[centers + 1]
    found = [[], [], [], []]
    active = np.ones(centers.size, dtype=bool)
    for _ in range(levels):
        if not np.any(active):
            break
        L, H = lo[active], hi[active]
        frac = np.linspace(0.0, 1.0, sub)
        pts = L[:, None] + (H - L)[:, None] * frac[None, :]
        zz = _eval_z(pts.ravel(), threads).reshape(pts.shape)
        sg = np.signbit(zz)
        change = sg[:, :-1] != sg[:, 1:]
        has = change.any(axis=1)
        r, c = np.nonzero(change)
        found[0].append(pts[r, c])
        found[1].append(pts[r, c + 1])
        found[2].append(zz[r, c])
        found[3].append(zz[r, c + 1])
        # zoom on the sub-grid minimum of |Z| for dips that still show no crossing
        j = np.argmin(np.abs(zz), axis=1)
        j = np.clip(j, 1, sub - 2)
        rows = np.arange(pts.shape[0])
        newL, newH = pts[rows, j - 1], pts[rows, j + 1]
        idx = np.flatnonzero(active)
        active[idx[has]] = False
        lo[idx], hi[idx] = newL, newH
    return [np.concatenate(f) if f else np.empty(0) for f in found]


def _illinois(a, b, fa, fb, threads, tol=1e-10, max_iter=200):
    """Vectorised Illinois (modified regula falsi) refinement of sign brackets."""
    a, b, fa, fb = (np.array(x, dtype=np.float64) for x in (a, b, fa, fb))
    side = np.zeros(a.size, dtype=np.int8)
    root = (a + b) / 2
    active = np.ones(a.size, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        A, B, FA, FB = a[idx], b[idx], fa[idx], fb[idx]
        denom = FB - FA
        c = np.where(denom != 0, B - FB * (B - A) / np.where(denom != 0, denom, 1.0), (A + B) / 2)
        c = np.where((c <= np.minimum(A, B)) | (c >= np.maximum(A, B)), (A + B) / 2, c)
        fc = _eval_z(c, threads)
        root[idx] = c
        same_b = np.signbit(fc) == np.signbit(FB)
        # replace b with c; downweight a if a was retained last time too
        sb = idx[same_b]
        b[sb], fb[sb] = c[same_b], fc[same_b]
        fa[sb] = np.where(side[sb] == -1, fa[sb] / 2, fa[sb])
        side[sb] = -1
        sa = idx[~same_b]
        a[sa], fa[sa] = c[~same_b], fc[~same_b]
        fb[sa] = np.where(side[sa] == 1, fb[sa] / 2, fb[sa])
        side[sa] = 1
        done = (np.abs(b[idx] - a[idx]) < tol * np.maximum(1.0, np.abs(c) / 1e4)) | (fc == 0)
        active[idx[done]] = False
    return root


def _locate(a: float, b: float, threads: int, refine: float = 1.0) -> np.ndarray:
    t = _grid(a, b, refine)
    z = _eval_z(t, threads)
    A, B, FA, FB = _sign_brackets(t, z)
    dA, dB, dFA, dFB = _dip_brackets(t, z, threads)
    A, B = np.concatenate([A, dA]), np.concatenate([B, dB])
    FA, FB = np.concatenate([FA, dFA]), np.concatenate([FB, dFB])
    roots = _illinois(A, B, FA, FB, threads)
    return _dedupe(np.sort(roots))


def _dedupe(roots: np.ndarray) -> np.ndarray:
    if roots.size < 2:
        return roots
    keep = np.concatenate([[True], np.diff(roots) > 1e-7])
    return roots[keep]


def turing_residuals(ordinates: np.ndarray) -> np.ndarray:
    """n - 1/2 - smooth N(gamma_n): the value of S at each zero under the averaging convention."""
    n = np.arange(1, ordinates.size + 1, dtype=np.float64)
    return n - 0.5 - rv_mangoldt_count(np.maximum(ordinates, 2.0))


def _bad_blocks(ordinates: np.ndarray, block: int):
    res = turing_residuals(ordinates)
    bad = []
    for start in range(0, ordinates.size, block):
        seg = res[start : start + block]
        if seg.size and abs(float(np.median(seg))) > 0.5:
            bad.append(start)
    return bad


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ZETALAB_THREADS", "1")))
    except ValueError:
        return 1


def find_zeros(t_max: float, threads: int | None = None, block: int = CHECK_BLOCK) -> ZeroSet:
    """All zero ordinates in (0, t_max], checked block-wise against the smooth count."""
    if not 10 <= t_max <= 1e7:
        raise DomainError(f"t_max must lie in [10, 1e7], got {t_max}")
    threads = threads or default_threads()
    roots = _locate(_GRID_START, t_max, threads)
    roots = roots[(roots > 0) & (roots <= t_max)]
    for attempt in range(4):
        bad = _bad_blocks(roots, block)
        if not bad:
            break
        start = bad[0]
        lo = float(roots[max(0, start - block)]) - 1.0 if start else _GRID_START
        hi = float(roots[min(roots.size - 1, start + block)]) + 1.0
        lo, hi = max(lo, _GRID_START), min(hi, t_max)
        fresh = _locate(lo, hi, threads, refine=4.0 * (attempt + 1))
        keep = (roots < lo) | (roots > hi)
        roots = _dedupe(np.sort(np.concatenate([roots[keep], fresh])))
    else:
        start = bad[0]
        seg = roots[start : start + block]
        raise IncompleteZeroSetError(
            (float(seg[0]), float(seg[-1])),
            found=int(start + seg.size),
            expected=float(rv_mangoldt_count(seg[-1])),
        )
    return ZeroSet(roots, float(t_max), "computed")


def save_zeros(zeros: ZeroSet, path) -> None:
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"# t_max={zeros.t_max!r}\n")
        for g in zeros.ordinates:
            fh.write(f"{float(g)!r}\n")


def ingest_zeros(path) -> ZeroSet:
    """Read a zero file: '#' comments, blank lines ignored, one ordinate per line."""
    path = Path(path)
    vals, t_max_header = [], None
    prev = -math.inf
    try:
        fh = path.open()
    except OSError as exc:
        raise DataValidationError(f"cannot open zero file {path}: {exc.strerror}") from None
    with fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("t_max="):
                    try:
                        t_max_header = float(body.split("=", 1)[1])
                    except ValueError:
                        raise ZeroFileParseError(path, line_no, "bad t_max header") from None
                continue
            try:
                g = float(line.split()[0])
            except ValueError:
                raise ZeroFileParseError(path, line_no, f"not a number: {line!r}") from None
            if not math.isfinite(g) or g <= 0:
                raise ZeroFileParseError(path, line_no, f"ordinate must be positive: {line!r}")
            if g <= prev:
                raise ZeroFileParseError(path, line_no, "ordinates are not strictly increasing")
            vals.append(g)
            prev = g
    if not vals:
        raise DataValidationError(f"{path}: no ordinates found")
    t_max = vals[-1] if t_max_header is None else max(t_max_header, vals[-1])
    expected = rv_mangoldt_count(max(t_max, 2.0))
    if expected > 0 and abs(len(vals) - expected) > 0.1 * expected:
        warnings.warn(
            f"{path}: {len(vals)} ordinates up to {t_max:.3f}, smooth count predicts {expected:.1f}",
            stacklevel=2,
        )
    return ZeroSet(np.array(vals), float(t_max), "ingested")


def nearest_gap(zeros: ZeroSet, t: float) -> float:
    """Distance from t to the nearest ordinate different from t."""
    ords = zeros.ordinates
    if ords.size == 0:
        raise DataValidationError("zero set is empty")
    i = int(np.searchsorted(ords, t))
    best = math.inf
    for j in (i - 2, i - 1, i, i + 1):
        if 0 <= j < ords.size:
            d = abs(float(ords[j]) - t)
            if d > MATCH_TOL:
                best = min(best, d)
    return best


def nearest_gaps(zeros: ZeroSet, t) -> np.ndarray:
    """Vectorised ``nearest_gap``."""
    ords = zeros.ordinates
    if ords.size == 0:
        raise DataValidationError("zero set is empty")
    t = np.asarray(t, dtype=np.float64)
    i = np.searchsorted(ords, t)
    best = np.full(t.shape, np.inf)
    for off in (-2, -1, 0, 1):
        j = i + off
        ok = (j >= 0) & (j < ords.size)
        d = np.where(ok, np.abs(ords[np.clip(j, 0, ords.size - 1)] - t), np.inf)
        d = np.where(d > MATCH_TOL, d, np.inf)
        best = np.minimum(best, d)
    return best


def multiplicity_at(zeros: ZeroSet, t: float) -> int:
    """1 if t matches an ordinate to MATCH_TOL, else 0 (zeros are taken simple)."""
    ords = zeros.ordinates
    i = int(np.searchsorted(ords, t))
    return int(any(0 <= j < ords.size and abs(ords[j] - t) <= MATCH_TOL for j in (i - 1, i)))


def gap_fraction(zeros: ZeroSet, C: float) -> float:
    """Fraction of ordinates whose successor lies within C / log(t_max)."""
    n = len(zeros)
    if n == 0:
        raise DataValidationError("zero set is empty")
    gaps = np.diff(zeros.ordinates)
    return float(np.count_nonzero(gaps <= C / math.log(zeros.t_max))) / n


@dataclass(frozen=True)
class GapCurve:
    C: np.ndarray
    fraction: np.ndarray
    k_fit: float  # smallest K with fraction <= min(K C, 1) on the grid
    c_sqrt: np.ndarray  # reference curve C^(1/2)
    c_linear: np.ndarray  # reference curve C^1


def gap_fraction_curve(zeros: ZeroSet, C_grid) -> GapCurve:
    C = np.asarray(C_grid, dtype=np.float64)
    frac = np.array([gap_fraction(zeros, c) for c in C])
    k_fit = float(np.max(frac / C)) if C.size else 0.0
    return GapCurve(C, frac, k_fit, np.sqrt(C), C.copy())


@dataclass(frozen=True)
class PairCorrelationHistogram:
    edges: np.ndarray
    centers: np.ndarray
    density: np.ndarray
    conjectured: np.ndarray
    counts: np.ndarray
    n_zeros: int
    scaling: str


def montgomery_density(x):
    """1 - (sin(pi x) / (pi x))^2, with the value 0 at x = 0."""
    x = np.asarray(x, dtype=np.float64)
    return 1.0 - np.sinc(x) ** 2


def pair_correlation_histogram(zeros: ZeroSet, bins: int, x_max: float, scaling: str = "unfolded"):
    """Histogram of normalised differences gamma - gamma' > 0 up to x_max.

    ``scaling="unfolded"`` maps each ordinate through the smooth counting
    function before differencing; ``"log_t"`` multiplies raw differences by
    log(t_max)/(2 pi).  Counts are divided by N * bin width.
    """
    if bins < 10:
        raise DomainError("bins must be >= 10")
    if not 0 < x_max <= 5:
        raise DomainError("x_max must lie in (0, 5]")
    ords = zeros.ordinates
    if scaling == "unfolded":
        u = rv_mangoldt_count(np.maximum(ords, 2.0))
    elif scaling == "log_t":
        u = ords * math.log(zeros.t_max) / TWO_PI
    else:
        raise DomainError(f"unknown scaling {scaling!r}")
    edges = np.linspace(0.0, x_max, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    for k in range(1, u.size):
        d = u[k:] - u[:-k]
        if d.size == 0 or d.min() > x_max:
            break
        d = d[(d > 0) & (d <= x_max)]
        counts += np.histogram(d, bins=edges)[0]
    width = edges[1] - edges[0]
    n = max(len(zeros), 1)
    centers = (edges[:-1] + edges[1:]) / 2
    return PairCorrelationHistogram(
        edges, centers, counts / (n * width), montgomery_density(centers), counts, len(zeros), scaling
    )
