"""Transition errors against a known map, empirical CCDFs, anomalous-event
detection and inter-event interval statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fitting import LinearFit, least_squares_slope
from .series import LogisticParams, as_values, logistic_map

__all__ = [
    "TransitionErrorSeries",
    "EmpiricalCcdf",
    "IntervalSet",
    "transition_errors",
    "ccdf",
    "detect_events",
    "interval_histogram",
    "IntervalFit",
    "sturges_bin_width",
    "fit_interval_exponential",
]


@dataclass(frozen=True)
class TransitionErrorSeries:
    e_values: np.ndarray  # f(x[t]) - x[t+1]
    d_values: np.ndarray  # |e|

    def __len__(self) -> int:
        return self.e_values.size


@dataclass(frozen=True)
class EmpiricalCcdf:
    d: np.ndarray  # distinct sample values, ascending
    p: np.ndarray  # fraction of samples >= d

    @property
    def points(self):
        return list(zip(self.d.tolist(), self.p.tolist()))

    def __call__(self, x):
        """Step-function value: fraction of samples >= x."""
        x = np.asarray(x, dtype=np.float64)
        i = np.searchsorted(self.d, x, side="left")
        out = np.where(i < self.d.size, self.p[np.minimum(i, self.d.size - 1)], 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class IntervalSet:
    threshold: float
    event_times: np.ndarray  # 0-based indices t with d[t] > threshold
    intervals: np.ndarray

    @property
    def n_events(self) -> int:
        return int(self.event_times.size)

    @property
    def empty(self) -> bool:
        return self.intervals.size == 0


def transition_errors(series, map_params: LogisticParams = LogisticParams()) -> TransitionErrorSeries:
    """``e[t] = f(x[t]) - x[t+1]`` with the unclamped polynomial map."""
    x = as_values(series)
    if x.size < 2:
        raise ValueError("need at least 2 values")
    e = logistic_map(x[:-1], map_params.a) - x[1:]
    e.setflags(write=False)
    d = np.abs(e)
    d.setflags(write=False)
    return TransitionErrorSeries(e, d)


def ccdf(samples) -> EmpiricalCcdf:
    """Empirical CCDF at each distinct sample value.

    For sorted samples ``d_(1) <= ... <= d_(n)`` the value at ``d_(i)`` is
    ``(n - i + 1) / n``; duplicates keep the value of their first rank.
    """
    d = np.sort(np.asarray(samples, dtype=np.float64).reshape(-1))
    if d.size == 0:
        raise ValueError("need at least one sample")
    if np.any(d < 0) or np.any(~np.isfinite(d)):
        raise ValueError("CCDF samples must be finite and non-negative")
    n = d.size
    values, first = np.unique(d, return_index=True)
    return EmpiricalCcdf(values, (n - first) / n)


def detect_events(errors, threshold: float) -> IntervalSet:
    """Times where the absolute error strictly exceeds ``threshold``, and
    the gaps between consecutive such times."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    d = errors.d_values if isinstance(errors, TransitionErrorSeries) else np.abs(np.asarray(errors, float))
    times = np.flatnonzero(d > threshold)
    return IntervalSet(float(threshold), times, np.diff(times))


def interval_histogram(intervals, bin_width: int = 1, zero_fill: bool = False):
    """Integer-binned counts of interval lengths.

    Bins are ``[1, w], [w+1, 2w], ...`` up to the longest interval; rows
    are ``(low, high, count)``.  Empty bins are dropped unless
    ``zero_fill``.
    """
    if bin_width < 1:
        raise ValueError("bin_width must be at least 1")
    ls = intervals.intervals if isinstance(intervals, IntervalSet) else np.asarray(intervals)
    ls = np.asarray(ls, dtype=np.int64)
    if ls.size == 0:
        return []
    if np.any(ls < 1):
        raise ValueError("interval lengths must be >= 1")
    counts = np.bincount((ls - 1) // bin_width)
    rows = []
    for b, c in enumerate(counts.tolist()):
        if c or zero_fill:
            rows.append((b * bin_width + 1, (b + 1) * bin_width, c))
    return rows


@dataclass(frozen=True)
class IntervalFit:
    line: LinearFit
    bin_width: int
    l_min: int
    n_intervals: int
    n_bins: int

    @property
    def rate(self) -> float:
        """Per-step event rate implied by the log-count slope."""
        return -self.line.slope

    @property
    def r_squared(self) -> float:
        return self.line.r_squared


def sturges_bin_width(n: int, span: int) -> int:
    bins = math.ceil(math.log2(n) + 1) if n > 0 else 1
    return max(1, math.ceil(span / bins))


def fit_interval_exponential(intervals, l_min: int = 5, bin_width: int | None = None) -> IntervalFit:
    """Exponential fit to the interval histogram for ``l >= l_min``.

    Counts are binned with width ``bin_width`` (Sturges' rule when None),
    starting at ``l_min``; a straight line is fitted to log-count against
    bin centre, weighting each non-empty bin by its count (the inverse
    Poisson variance of a log-count).
    """
    ls = intervals.intervals if isinstance(intervals, IntervalSet) else np.asarray(intervals)
    ls = np.asarray(ls, dtype=np.int64)
    ls = ls[ls >= l_min]
    if ls.size < 2:
        raise ValueError(f"fewer than 2 intervals with l >= {l_min}")
    span = int(ls.max()) - l_min + 1
    if bin_width is None:
        bin_width = sturges_bin_width(ls.size, span)
    counts = np.bincount((ls - l_min) // bin_width)
    centres = l_min + (np.arange(counts.size) + 0.5) * bin_width - 0.5
    keep = counts > 0
    if keep.sum() < 2:
        raise ValueError("all intervals fall into a single bin")
    line = least_squares_slope(
        np.column_stack([centres[keep], np.log(counts[keep])]), weights=counts[keep].astype(float)
    )
    return IntervalFit(line, int(bin_width), int(l_min), int(ls.size), int(keep.sum()))
