"""Surrogate series for significance testing: random shuffle (RS),
Fourier-transform phase randomisation (FT) and the amplitude-adjusted
Fourier transform (AAFT)."""
from __future__ import annotations

from enum import Enum

import numpy as np

from .series import TimeSeries, as_values, rng_for, standard_normal, trial_seed, uniform

__all__ = [
    "SurrogateKind",
    "random_shuffle_surrogate",
    "ft_surrogate",
    "aaft_surrogate",
    "make_surrogate",
    "surrogate_batch",
    "ranks",
]


class SurrogateKind(str, Enum):
    RS = "rs"
    FT = "ft"
    AAFT = "aaft"


def _permutation(rng: np.random.Generator, n: int) -> np.ndarray:
    # sort i.i.d. uniform keys: a uniform permutation with a fixed recipe
    return np.argsort(uniform(rng, n), kind="stable")


def ranks(x: np.ndarray) -> np.ndarray:
    """0-based ranks; equal values are ranked by ascending index."""
    order = np.argsort(x, kind="stable")
    r = np.empty(x.size, dtype=np.int64)
    r[order] = np.arange(x.size)
    return r


def random_shuffle_surrogate(series, seed: int) -> TimeSeries:
    x = as_values(series)
    if x.size < 2:
        raise ValueError("random shuffle needs at least 2 values")
    return TimeSeries(x[_permutation(rng_for(seed), x.size)])


def _phase_randomize(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = x.size
    spectrum = np.fft.rfft(x)
    # bins 1 .. ceil(n/2)-1 get new phases; DC and (even n) Nyquist are kept
    n_free = (n - 1) // 2
    phases = 2.0 * np.pi * uniform(rng, n_free)
    out = spectrum.copy()
    out[1 : n_free + 1] = np.abs(spectrum[1 : n_free + 1]) * np.exp(1j * phases)
    return np.fft.irfft(out, n)


def ft_surrogate(series, seed: int) -> TimeSeries:
    """Randomise Fourier phases while keeping the amplitude spectrum.

    Arbitrary lengths are handled without padding.  The DC term, and the
    Nyquist term for even lengths, are left untouched so the inverse
    transform is exactly real.
    """
    x = as_values(series)
    if x.size < 4:
        raise ValueError("FT surrogate needs at least 4 values")
    return TimeSeries(_phase_randomize(x, rng_for(seed)))


def aaft_surrogate(series, seed: int) -> TimeSeries:
    """Amplitude-adjusted Fourier-transform surrogate.

    1. Sorted Gaussian noise is arranged in the rank order of the data.
    2. That Gaussianised copy is phase randomised.
    3. The sorted data are arranged in the rank order of the result.
    """
    x = as_values(series)
    if x.size < 4:
        raise ValueError("AAFT surrogate needs at least 4 values")
    rng = rng_for(seed)
    gauss = np.sort(standard_normal(rng, x.size))[ranks(x)]
    shuffled = _phase_randomize(gauss, rng)
    return TimeSeries(np.sort(x)[ranks(shuffled)])


_MAKERS = {
    SurrogateKind.RS: random_shuffle_surrogate,
    SurrogateKind.FT: ft_surrogate,
    SurrogateKind.AAFT: aaft_surrogate,
}


def make_surrogate(kind, series, seed: int) -> TimeSeries:
    return _MAKERS[SurrogateKind(kind)](series, seed)


def surrogate_batch(kind, series, trials: int, seed: int):
    """Yield ``trials`` surrogates; trial ``i`` uses seed ``seed + i``."""
    for i in range(trials):
        yield make_surrogate(kind, series, trial_seed(seed, i))
