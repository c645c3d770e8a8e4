"""Delay embedding and exact neighbour queries.

Queries go through a ``scipy.spatial.cKDTree`` but the final selection is
always made on distances recomputed here, with ties broken by the smaller
index, so the tree path returns exactly the same index sets as the
exhaustive scans (``k_nearest_brute``, ``radius_neighbors_brute``).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .series import as_values

__all__ = [
    "EmbeddingSet",
    "InsufficientNeighborsError",
    "delay_embed",
    "k_nearest",
    "k_nearest_batch",
    "k_nearest_brute",
    "radius_neighbors",
    "radius_neighbors_brute",
]

MAX_DIMENSION = 32
# relative slack on tree search radii; candidates are re-filtered exactly
_RADIUS_SLACK = 1e-9


class InsufficientNeighborsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Delay vectors ``points[t] = (x[t], ..., x[t+m-1])`` of one series."""

    m: int
    points: np.ndarray
    source_length: int
    _trees: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __len__(self) -> int:
        return self.points.shape[0]

    def tree(self, horizon: int = 0) -> cKDTree:
        """KD-tree over the first ``len(self) - horizon`` points (cached)."""
        with self._lock:
            tree = self._trees.get(horizon)
            if tree is None:
                tree = cKDTree(self.points[: len(self) - horizon], balanced_tree=False)
                self._trees[horizon] = tree
        return tree


def delay_embed(series, m: int) -> EmbeddingSet:
    x = as_values(series)
    m = int(m)
    if m < 1 or m > MAX_DIMENSION:
        raise ValueError(f"embedding dimension must be in 1..{MAX_DIMENSION}, got {m}")
    if m > x.size:
        raise ValueError(f"embedding dimension {m} exceeds series length {x.size}")
    pts = np.ascontiguousarray(np.lib.stride_tricks.sliding_window_view(x, m))
    pts.setflags(write=False)
    return EmbeddingSet(m=m, points=pts, source_length=x.size)


def _distances(points: np.ndarray, idx: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = points[idx] - center
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _eligible(idx: np.ndarray, t0: int, n: int, theiler: int, horizon: int) -> np.ndarray:
    return (np.abs(idx - t0) > theiler) & (idx <= n - 1 - horizon)


def _check_query(emb: EmbeddingSet, t0: int, theiler: int, horizon: int):
    if not 0 <= t0 < len(emb):
        raise IndexError(f"reference index {t0} out of range for {len(emb)} points")
    if theiler < 0 or horizon < 0:
        raise ValueError("theiler window and horizon must be non-negative")
    if horizon >= len(emb):
        raise InsufficientNeighborsError("horizon leaves no eligible points")


def _n_eligible(n: int, t0: int, theiler: int, horizon: int) -> int:
    top = n - 1 - horizon
    if top < 0:
        return 0
    lo, hi = max(0, t0 - theiler), min(top, t0 + theiler)
    excluded = max(0, hi - lo + 1)
    return top + 1 - excluded


def k_nearest_brute(emb: EmbeddingSet, t0: int, K: int, theiler: int = 0, horizon: int = 0) -> np.ndarray:
    """Exhaustive-scan reference for :func:`k_nearest`."""
    _check_query(emb, t0, theiler, horizon)
    n = len(emb)
    idx = np.arange(n)
    idx = idx[_eligible(idx, t0, n, theiler, horizon)]
    if idx.size < K:
        raise InsufficientNeighborsError(f"only {idx.size} eligible points, {K} requested")
    d = _distances(emb.points, idx, emb.points[t0])
    order = np.lexsort((idx, d))
    return idx[order[:K]]


def k_nearest_batch(
    emb: EmbeddingSet, t0s, K: int, theiler: int = 0, horizon: int = 0
) -> np.ndarray:
    """Indices of the ``K`` nearest eligible points for each reference.

    A point ``j`` is eligible for reference ``t0`` when ``|j - t0| > theiler``
    and ``j <= len(emb) - 1 - horizon``.  Rows are ordered by distance, ties
    by index.  Returns an integer array of shape ``(len(t0s), K)``.
    """
    t0s = np.atleast_1d(np.asarray(t0s, dtype=np.int64))
    K = int(K)
    if K < 1:
        raise ValueError("K must be at least 1")
    n = len(emb)
    for t0 in t0s:
        _check_query(emb, int(t0), theiler, horizon)
        avail = _n_eligible(n, int(t0), theiler, horizon)
        if avail < K:
            raise InsufficientNeighborsError(
                f"reference {int(t0)} has {avail} eligible points, {K} requested"
            )
    out = np.empty((t0s.size, K), dtype=np.int64)
    if t0s.size == 0:
        return out
    tree = emb.tree(horizon)
    size = n - horizon
    # at most 2*theiler+1 tree points are excluded for any reference
    kq = min(size, K + 2 * theiler + 1)
    centers = emb.points[t0s]
    _, first = tree.query(centers, k=kq)
    first = np.asarray(first).reshape(t0s.size, kq)
    radii = np.empty(t0s.size)
    for r, t0 in enumerate(t0s):
        cand = first[r]
        cand = cand[_eligible(cand, int(t0), n, theiler, horizon)]
        d = _distances(emb.points, cand, centers[r])
        radii[r] = np.sort(d)[K - 1]
    balls = tree.query_ball_point(centers, radii * (1.0 + _RADIUS_SLACK) + 1e-300)
    for r, t0 in enumerate(t0s):
        cand = np.asarray(balls[r], dtype=np.int64)
        cand = cand[_eligible(cand, int(t0), n, theiler, horizon)]
        d = _distances(emb.points, cand, centers[r])
        order = np.lexsort((cand, d))
        out[r] = cand[order[:K]]
    return out


def k_nearest(emb: EmbeddingSet, t0: int, K: int, theiler: int = 0, horizon: int = 0) -> np.ndarray:
    return k_nearest_batch(emb, [t0], K, theiler, horizon)[0]


def radius_neighbors_brute(
    emb: EmbeddingSet, t0: int, eps: float, theiler: int = 0, horizon: int = 0
) -> np.ndarray:
    """Exhaustive-scan reference for :func:`radius_neighbors`."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    _check_query(emb, t0, theiler, horizon)
    n = len(emb)
    idx = np.arange(n)
    idx = idx[_eligible(idx, t0, n, theiler, horizon)]
    d = _distances(emb.points, idx, emb.points[t0])
    return idx[d <= eps]


def radius_neighbors(
    emb: EmbeddingSet, t0: int, eps: float, theiler: int = 0, horizon: int = 0
) -> np.ndarray:
    """All eligible indices within Euclidean distance ``eps`` of point ``t0``,
    in ascending order.  May be empty."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    _check_query(emb, t0, theiler, horizon)
    n = len(emb)
    center = emb.points[t0]
    cand = np.asarray(
        emb.tree(horizon).query_ball_point(center, eps * (1.0 + _RADIUS_SLACK)), dtype=np.int64
    )
    cand = cand[_eligible(cand, t0, n, theiler, horizon)]
    d = _distances(emb.points, cand, center)
    return np.sort(cand[d <= eps])
