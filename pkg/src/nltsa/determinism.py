"""Wayland translation-error test for determinism."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingSet, delay_embed, k_nearest_batch
from .series import as_values, rng_for, uniform

__all__ = [
    "DegenerateTranslationError",
    "WaylandConfig",
    "WaylandResult",
    "translation_error",
    "translation_errors",
    "wayland_statistic",
]


class DegenerateTranslationError(ArithmeticError):
    """The mean translation vector of a neighbourhood is zero."""


@dataclass(frozen=True)
class WaylandConfig:
    m: int = 2
    K: int = 50
    n_refs: int = 1000
    seed: int = 0
    theiler: int = 0

    def __post_init__(self):
        if self.m < 1 or self.K < 1 or self.n_refs < 1:
            raise ValueError("m, K and n_refs must all be at least 1")


@dataclass
class WaylandResult:
    per_reference: np.ndarray
    median: float
    references: np.ndarray
    skipped: int = 0
    requested: int = 0
    warnings: list = field(default_factory=list)

    @property
    def n_used(self) -> int:
        return int(self.per_reference.size)


def _translation_error_rows(emb: EmbeddingSet, t0s: np.ndarray, nbrs: np.ndarray) -> np.ndarray:
    pts = emb.points
    group = np.concatenate([t0s[:, None], nbrs], axis=1)  # (B, K+1), reference first
    v = pts[group + 1] - pts[group]  # (B, K+1, m)
    vbar = v.mean(axis=1)
    dev = np.linalg.norm(v - vbar[:, None, :], axis=2).mean(axis=1)
    norm = np.linalg.norm(vbar, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(norm > 0, dev / norm, np.nan)


def translation_errors(emb: EmbeddingSet, t0s, K: int, theiler: int = 0) -> np.ndarray:
    """Translation error for several references at once; NaN marks a
    degenerate (zero mean translation) neighbourhood."""
    t0s = np.atleast_1d(np.asarray(t0s, dtype=np.int64))
    if np.any(t0s > len(emb) - 2):
        raise ValueError("reference points need a successor")
    nbrs = k_nearest_batch(emb, t0s, K, theiler=theiler, horizon=1)
    return _translation_error_rows(emb, t0s, nbrs)


def translation_error(emb: EmbeddingSet, t0: int, K: int, theiler: int = 0) -> float:
    """Wayland's translation error at reference ``t0``.

    The translation vectors ``v = x[t+1] - x[t]`` of the reference and its
    ``K`` nearest neighbours (which must have successors) are compared with
    their mean ``vbar``: the result is the average of
    ``|v - vbar| / |vbar|`` over the ``K + 1`` vectors.
    """
    e = float(translation_errors(emb, [t0], K, theiler)[0])
    if np.isnan(e):
        raise DegenerateTranslationError(f"zero mean translation vector at reference {t0}")
    return e


def wayland_statistic(series, cfg: WaylandConfig = WaylandConfig()) -> WaylandResult:
    """Median translation error over randomly chosen reference times.

    References are drawn uniformly without replacement (seeded).  A
    reference whose neighbourhood has zero mean translation is skipped and
    the next draw takes its place; skips are counted in the result.
    """
    x = as_values(series)
    if x.size < cfg.m + 1 + cfg.K:
        raise ValueError(
            f"series of length {x.size} too short for m={cfg.m}, K={cfg.K}"
        )
    emb = delay_embed(x, cfg.m)
    n_eligible = len(emb) - 1
    # random permutation by sorting uniform keys; draw order = permutation order
    order = np.argsort(uniform(rng_for(cfg.seed), n_eligible), kind="stable")
    warnings = []
    if n_eligible < cfg.n_refs:
        warnings.append(
            f"only {n_eligible} eligible references, fewer than the {cfg.n_refs} requested"
        )

    values, refs = [], []
    skipped = 0
    pos = 0
    while len(values) < cfg.n_refs and pos < n_eligible:
        batch = order[pos : pos + (cfg.n_refs - len(values))]
        pos += batch.size
        errs = translation_errors(emb, batch, cfg.K, cfg.theiler)
        for t0, e in zip(batch.tolist(), errs.tolist()):
            if np.isnan(e):
                skipped += 1
                continue
            values.append(e)
            refs.append(t0)
    if skipped:
        warnings.append(f"{skipped} references skipped for zero mean translation")
    if not values:
        raise DegenerateTranslationError("every reference has zero mean translation")
    per_ref = np.array(values)
    return WaylandResult(
        per_reference=per_ref,
        median=float(np.median(per_ref)),
        references=np.array(refs, dtype=np.int64),
        skipped=skipped,
        requested=cfg.n_refs,
        warnings=warnings,
    )
