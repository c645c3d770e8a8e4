import math

import numpy as np
import pytest

from nltsa.determinism import (
    DegenerateTranslationError,
    WaylandConfig,
    translation_error,
    wayland_statistic,
)
from nltsa.embedding import delay_embed, k_nearest_brute
from nltsa.series import TimeSeries, add_gaussian_noise
from nltsa.surrogate import random_shuffle_surrogate

from conftest import logistic_series


def e_trans_oracle(points, t0, K):
    """Direct transcription of the translation-error formula with an
    exhaustive neighbour scan."""
    n = len(points)
    cands = [j for j in range(n - 1) if j != t0]
    cands.sort(key=lambda j: (math.dist(points[j], points[t0]), j))
    idx = [t0] + cands[:K]
    v = [[points[i + 1][q] - points[i][q] for q in range(len(points[0]))] for i in idx]
    vbar = [math.fsum(col) / (K + 1) for col in zip(*v)]
    nv = math.sqrt(math.fsum(c * c for c in vbar))
    return math.fsum(math.dist(vi, vbar) / nv for vi in v) / (K + 1)


def test_period_two_is_zero():
    emb = delay_embed([0, 1, 0, 1, 0, 1, 0, 1], 2)
    assert translation_error(emb, 0, 2) == 0.0


def test_identical_translations_zero():
    emb = delay_embed(np.arange(20.0), 1)
    assert translation_error(emb, 5, 4) == 0.0


def test_degenerate_translation():
    emb = delay_embed(np.zeros(20), 1)
    with pytest.raises(DegenerateTranslationError):
        translation_error(emb, 3, 4)


def test_matches_formula_transcription():
    x = logistic_series(3, length=10_000).values
    emb = delay_embed(x, 2)
    pts = emb.points.tolist()
    for t0 in (0, 17, 4321, 9997):
        fast = translation_error(emb, t0, 50)
        slow = e_trans_oracle(pts, t0, 50)
        assert fast >= 0
        assert abs(fast - slow) <= 1e-12


def test_neighbours_via_brute_scan_agree():
    x = np.random.default_rng(5).random(600)
    emb = delay_embed(x, 3)
    for t0 in range(0, 590, 37):
        assert np.array_equal(
            k_nearest_brute(emb, t0, 10, horizon=1),
            np.array(sorted(range(len(emb) - 1), key=lambda j: (np.linalg.norm(emb.points[j] - emb.points[t0]), j))[1:11]),
        )


@pytest.mark.parametrize("alpha, beta, tol", [(2.0, 0.0, 0.0), (-3.0, 5.0, 1e-9)])
def test_affine_invariance(alpha, beta, tol):
    x = logistic_series(4, length=3000).values
    e1 = translation_error(delay_embed(x, 2), 100, 20)
    e2 = translation_error(delay_embed(alpha * x + beta, 2), 100, 20)
    assert abs(e1 - e2) <= tol * max(1.0, e1)


def test_wayland_period_two_median_zero():
    x = TimeSeries(np.tile([0.2, 0.7], 500))
    res = wayland_statistic(x, WaylandConfig(m=2, K=10, n_refs=100))
    assert res.median == 0.0
    assert res.n_used == 100


def test_wayland_median_is_exact():
    x = logistic_series(2, length=5000)
    res = wayland_statistic(x, WaylandConfig(m=2, K=20, n_refs=200, seed=1))
    s = sorted(res.per_reference.tolist())
    assert res.median == (s[99] + s[100]) / 2
    assert np.all(res.per_reference >= 0)


def test_wayland_reproducible():
    x = logistic_series(2, length=5000)
    cfg = WaylandConfig(m=3, K=20, n_refs=300, seed=8)
    a, b = wayland_statistic(x, cfg), wayland_statistic(x, cfg)
    assert np.array_equal(a.per_reference, b.per_reference)
    assert np.array_equal(a.references, b.references)
    assert len(set(a.references.tolist())) == 300


def test_wayland_uses_all_references_when_short():
    x = logistic_series(2, length=200)
    res = wayland_statistic(x, WaylandConfig(m=2, K=10, n_refs=1000))
    assert res.n_used == len(x) - 2
    assert res.warnings


def test_wayland_skips_degenerate_references():
    # constant run gives zero mean translation for references inside it
    x = np.concatenate([np.full(60, 0.5), logistic_series(9, length=400).values])
    res = wayland_statistic(x, WaylandConfig(m=1, K=5, n_refs=400, seed=0))
    assert res.skipped > 0
    assert res.n_used + res.skipped <= len(x) - 1


def test_wayland_too_short():
    with pytest.raises(ValueError):
        wayland_statistic(np.arange(10.0), WaylandConfig(m=2, K=10))


@pytest.mark.slow
def test_ordering_logistic_noisy_shuffle(logistic_1e5):
    cfg = WaylandConfig(m=2, K=50, n_refs=1000)
    det = wayland_statistic(logistic_1e5, cfg).median
    noisy = wayland_statistic(add_gaussian_noise(logistic_1e5, 0.0014, 1), cfg).median
    rs = wayland_statistic(random_shuffle_surrogate(logistic_1e5, 1), cfg).median
    assert det < noisy < rs


def test_noise_trend_monotone():
    x = logistic_series(6, length=20_000)
    cfg = WaylandConfig(m=2, K=30, n_refs=500)
    meds = [wayland_statistic(add_gaussian_noise(x, v, 3), cfg).median for v in (1e-7, 1e-6, 1e-5, 1e-4, 1e-3)]
    det = wayland_statistic(x, cfg).median
    assert det < meds[0]
    assert all(a < b for a, b in zip(meds, meds[1:]))
