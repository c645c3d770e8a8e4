import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nltsa.surrogate import aaft_surrogate, ft_surrogate, make_surrogate, random_shuffle_surrogate, ranks

from conftest import logistic_series


def amplitude_rel_error(x, y):
    ax, ay = np.abs(np.fft.fft(x)), np.abs(np.fft.fft(y))
    scale = max(ax.max(), 1e-300)
    # relative per component, floored at the largest amplitude times machine precision
    return np.max(np.abs(ax - ay) / np.maximum(ax, scale * 1e-6))


def test_rs_constant():
    assert random_shuffle_surrogate([5.0, 5.0, 5.0], 3).values.tolist() == [5.0, 5.0, 5.0]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=4, max_size=200), st.integers(0, 2**32))
def test_rs_and_aaft_preserve_multiset(values, seed):
    x = np.array(values)
    assert np.array_equal(np.sort(random_shuffle_surrogate(x, seed).values), np.sort(x))
    assert np.array_equal(np.sort(aaft_surrogate(x, seed).values), np.sort(x))


def test_rs_uniform_over_permutations():
    """Each of the 24 orderings of 4 values within 5 sigma of uniform."""
    trials = 10_000
    perms = {p: 0 for p in itertools.permutations(range(4))}
    for s in range(trials):
        perms[tuple(int(v) for v in random_shuffle_surrogate([0.0, 1.0, 2.0, 3.0], s).values)] += 1
    p = 1 / 24
    sigma = math.sqrt(trials * p * (1 - p))
    assert all(abs(c - trials * p) <= 5 * sigma for c in perms.values())


def test_ft_constant_series_unchanged():
    out = ft_surrogate(np.full(33, 0.37), 1).values
    assert np.allclose(out, 0.37, rtol=0, atol=1e-15)


@pytest.mark.parametrize("n", [4, 5, 64, 97, 1000, 1001])
def test_ft_amplitude_and_mean(n):
    x = logistic_series(n, length=n).values
    y = ft_surrogate(x, 3).values
    assert y.dtype == np.float64 and y.shape == x.shape
    assert amplitude_rel_error(x, y) <= 1e-8
    assert abs(y.mean() - x.mean()) <= 1e-10 * abs(x.mean())


def test_ft_imaginary_residue_small():
    x = logistic_series(0, length=1001).values
    rng = np.random.default_rng(0)
    spectrum = np.fft.fft(x)
    n = x.size
    half = (n - 1) // 2
    ph = np.exp(2j * np.pi * rng.random(half))
    spectrum[1 : half + 1] = np.abs(spectrum[1 : half + 1]) * ph
    spectrum[n - half :] = np.conj(spectrum[1 : half + 1][::-1])
    back = np.fft.ifft(spectrum)
    assert np.max(np.abs(back.imag)) <= 1e-10 * np.max(np.abs(x))


def test_dft_round_trip():
    x = logistic_series(1, length=997).values
    assert np.max(np.abs(np.fft.irfft(np.fft.rfft(x), x.size) - x)) <= 1e-10 * np.max(np.abs(x))


def test_aaft_monotone_series():
    x = np.arange(1.0, 65.0)
    y = aaft_surrogate(x, 4).values
    assert sorted(y.tolist()) == x.tolist()


def test_ranks_ties_by_index():
    assert ranks(np.array([1.0, 0.0, 1.0, 0.0])).tolist() == [2, 0, 3, 1]


@pytest.mark.parametrize("kind", ["rs", "ft", "aaft"])
def test_same_seed_same_output_different_seed_differs(kind):
    x = logistic_series(2, length=64).values
    a = make_surrogate(kind, x, 10).values
    assert np.array_equal(a, make_surrogate(kind, x, 10).values)
    outs = {make_surrogate(kind, x, s).values.tobytes() for s in range(100)}
    assert len(outs) == 100


def test_short_inputs_rejected():
    with pytest.raises(ValueError):
        ft_surrogate([1.0, 2.0, 3.0], 0)
    with pytest.raises(ValueError):
        random_shuffle_surrogate([1.0], 0)
