"""Kantz stretching curve S(k) and maximal Lyapunov exponent estimation.

Neighbourhoods are found with a box-assisted search: points are binned on
a grid over their first (up to) two coordinates with cell size >= eps, so
every eps-neighbour of a point lies in the 3x3 block of cells around it.
The distance test itself uses all m coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .embedding import delay_embed
from .fitting import least_squares_slope
from .series import as_values

__all__ = [
    "KantzConfig",
    "StretchingCurve",
    "LyapunovEstimate",
    "EmptyCurveError",
    "default_epsilon",
    "stretching_curve",
    "estimate_lyapunov",
]

DEFAULT_EPS_FRACTION = 0.03
MAX_EPS_DOUBLINGS = 3
MIN_REFERENCE_FRACTION = 0.01
_MAX_CELLS_PER_AXIS = 4096


class EmptyCurveError(ArithmeticError):
    pass


@dataclass(frozen=True)
class KantzConfig:
    m: int = 2
    eps: float | None = None  # None: DEFAULT_EPS_FRACTION * data range, with fallback
    k_max: int = 10
    min_neighbors: int = 1
    theiler: int = 0

    def __post_init__(self):
        if self.eps is not None and not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.k_max < 1 or self.min_neighbors < 1 or self.m < 1 or self.theiler < 0:
            raise ValueError("invalid Kantz configuration")


@dataclass
class StretchingCurve:
    s_values: np.ndarray  # S(k) for k = 1..k_max; NaN where no reference qualified
    reference_counts: np.ndarray
    eps: float = float("nan")
    m: int = 0
    warnings: list = field(default_factory=list)

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.s_values.size + 1)


@dataclass(frozen=True)
class LyapunovEstimate:
    slope: float
    intercept: float
    fit_range: tuple
    residual_rms: float

    @property
    def lyapunov(self) -> float:
        return self.slope


def default_epsilon(series) -> float:
    x = as_values(series)
    span = float(x.max() - x.min())
    return DEFAULT_EPS_FRACTION * span if span > 0 else DEFAULT_EPS_FRACTION


@numba.njit(cache=True)
def _kantz_sums(X, eps, k_max, theiler, min_nb, cell, lo, ncell0, ncell1):
    n, m = X.shape
    g = 2 if m >= 2 else 1
    keys = np.empty(n, np.int64)
    for i in range(n):
        c0 = min(int((X[i, 0] - lo[0]) / cell), ncell0 - 1)
        c1 = 0
        if g == 2:
            c1 = min(int((X[i, 1] - lo[1]) / cell), ncell1 - 1)
        keys[i] = c0 * ncell1 + c1
    order = np.argsort(keys, kind="mergesort")
    start = np.zeros(ncell0 * ncell1 + 1, np.int64)
    for i in range(n):
        start[keys[i] + 1] += 1
    for c in range(ncell0 * ncell1):
        start[c + 1] += start[c]

    eps2 = eps * eps
    total = np.zeros(k_max)
    comp = np.zeros(k_max)  # Neumaier compensation for the sum over references
    counts = np.zeros(k_max, np.int64)
    acc = np.zeros(k_max)
    nn = np.zeros(k_max, np.int64)
    for t in range(n - 1):
        c0 = keys[t] // ncell1
        c1 = keys[t] % ncell1
        acc[:] = 0.0
        nn[:] = 0
        for a in range(max(c0 - 1, 0), min(c0 + 2, ncell0)):
            for b in range(max(c1 - 1, 0), min(c1 + 2, ncell1)):
                cid = a * ncell1 + b
                for p in range(start[cid], start[cid + 1]):
                    j = order[p]
                    if abs(j - t) <= theiler:
                        continue
                    d2 = 0.0
                    for q in range(m):
                        diff = X[t, q] - X[j, q]
                        d2 += diff * diff
                    if np.sqrt(d2) > eps:
                        continue
                    top = min(k_max, n - 1 - max(t, j))
                    for k in range(1, top + 1):
                        s = 0.0
                        for q in range(m):
                            diff = X[t + k, q] - X[j + k, q]
                            s += diff * diff
                        acc[k - 1] += np.sqrt(s)
                        nn[k - 1] += 1
        for k in range(k_max):
            if nn[k] >= min_nb and nn[k] > 0:
                v = np.log(acc[k] / nn[k])
                tot = total[k] + v
                if abs(total[k]) >= abs(v):
                    comp[k] += (total[k] - tot) + v
                else:
                    comp[k] += (v - tot) + total[k]
                total[k] = tot
                counts[k] += 1
    return total + comp, counts


def _curve_for_eps(points: np.ndarray, eps: float, cfg: KantzConfig):
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    g = min(points.shape[1], 2)
    cell = max(eps, float(span[:g].max()) / _MAX_CELLS_PER_AXIS, 1e-300)
    ncell0 = int(span[0] / cell) + 1
    ncell1 = int(span[1] / cell) + 1 if g == 2 else 1
    sums, counts = _kantz_sums(
        points, float(eps), int(cfg.k_max), int(cfg.theiler), int(cfg.min_neighbors),
        float(cell), lo.astype(np.float64), ncell0, ncell1,
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return s, counts


def stretching_curve(series, cfg: KantzConfig = KantzConfig()) -> StretchingCurve:
    """Average log-distance S(k), k = 1..k_max, between trajectories started
    from each reference point and from its eps-neighbours.

    For every k, a reference contributes only if it and at least
    ``min_neighbors`` of its neighbours still have a k-step future, and
    S(k) averages over the contributing references only.  When ``cfg.eps``
    is None the radius starts at ``DEFAULT_EPS_FRACTION`` of the data range
    and is doubled (at most three times) while fewer than 1% of the
    references have enough neighbours.
    """
    x = as_values(series)
    if x.size < cfg.m + cfg.k_max + 1:
        raise ValueError(f"series of length {x.size} too short for m={cfg.m}, k_max={cfg.k_max}")
    points = np.ascontiguousarray(delay_embed(x, cfg.m).points)
    n_refs = points.shape[0] - 1
    warnings = []
    eps = cfg.eps if cfg.eps is not None else default_epsilon(x)
    s, counts = _curve_for_eps(points, eps, cfg)
    if cfg.eps is None:
        for _ in range(MAX_EPS_DOUBLINGS):
            if counts[0] >= MIN_REFERENCE_FRACTION * n_refs:
                break
            warnings.append(
                f"eps={eps:.6g}: only {int(counts[0])} of {n_refs} references have "
                f">= {cfg.min_neighbors} neighbours; doubling eps"
            )
            eps *= 2.0
            s, counts = _curve_for_eps(points, eps, cfg)
    if np.all(counts == 0):
        raise EmptyCurveError(f"no reference has {cfg.min_neighbors} neighbours within eps={eps:.6g}")
    return StretchingCurve(s_values=s, reference_counts=counts, eps=float(eps), m=cfg.m, warnings=warnings)


def estimate_lyapunov(curve: StretchingCurve, k_min: int = 1, k_max_fit: int = 5) -> LyapunovEstimate:
    """Least-squares slope of S(k) over ``k_min <= k <= k_max_fit``."""
    if not k_max_fit > k_min or k_min < 1:
        raise ValueError(f"invalid fit range [{k_min}, {k_max_fit}]")
    s = np.asarray(curve.s_values, dtype=np.float64)
    if k_max_fit > s.size:
        raise ValueError(f"fit range ends at k={k_max_fit} but the curve stops at k={s.size}")
    ks = np.arange(k_min, k_max_fit + 1)
    ys = s[ks - 1]
    if np.any(~np.isfinite(ys)):
        raise ValueError(f"S(k) missing inside the fit range [{k_min}, {k_max_fit}]")
    fit = least_squares_slope(np.column_stack([ks, ys]))
    return LyapunovEstimate(fit.slope, fit.intercept, (int(k_min), int(k_max_fit)), fit.residual_rms)
