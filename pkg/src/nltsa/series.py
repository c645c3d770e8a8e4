"""Series container, logistic-map generators, noise injection and the
statistical stand-in for GAN output ("mimic" series).

Every random draw goes through ``rng_for`` so that a given
``(parameters, seed)`` pair always yields the same bits.  Gaussian and
exponential variates are produced from uniform doubles by explicit
transforms (Box-Muller, inversion) instead of numpy's distribution
methods, whose streams are not guaranteed across releases.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TimeSeries",
    "LogisticParams",
    "MimicParams",
    "rng_for",
    "uniform",
    "standard_normal",
    "standard_exponential",
    "trial_seed",
    "logistic_step",
    "logistic_map",
    "random_initial_value",
    "generate_trajectory",
    "add_gaussian_noise",
    "generate_mimic",
]

SEED_MAX = 2**64 - 1


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """An ordered, finite, non-empty sequence of scalar states."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        if v.size < 1:
            raise ValueError("a time series needs at least one value")
        if not np.all(np.isfinite(v)):
            raise ValueError("time series values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def __iter__(self):
        return iter(self.values.tolist())

    def __getitem__(self, item):
        return self.values[item]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"TimeSeries(L={len(self)})"


def as_values(series) -> np.ndarray:
    """Return the float64 values of a TimeSeries or array-like."""
    if isinstance(series, TimeSeries):
        return series.values
    return TimeSeries(series).values


@dataclass(frozen=True)
class LogisticParams:
    a: float = 4.0

    def __post_init__(self):
        if not 0.0 < self.a <= 4.0:
            raise ValueError(f"logistic parameter must satisfy 0 < a <= 4, got {self.a}")


@dataclass(frozen=True)
class MimicParams:
    """Error model for the synthetic GAN stand-in.

    Each step adds a signed error whose magnitude is exponential with
    scale ``base_noise_scale``, or with probability ``anomaly_prob``
    exponential with scale ``anomaly_scale``; the result is clamped to
    ``[clamp_low, clamp_high]``.
    """

    base_noise_scale: float = 0.01
    anomaly_prob: float = 1e-3
    anomaly_scale: float = 0.2
    clamp_low: float = 0.0
    clamp_high: float = 1.0

    def __post_init__(self):
        if self.base_noise_scale < 0:
            raise ValueError("base_noise_scale must be non-negative")
        if not 0.0 <= self.anomaly_prob < 1.0:
            raise ValueError("anomaly_prob must lie in [0, 1)")
        if self.anomaly_scale <= self.base_noise_scale:
            raise ValueError("anomaly_scale must exceed base_noise_scale")
        if not self.clamp_low < self.clamp_high:
            raise ValueError("clamp_low must be below clamp_high")


# -- seeded random streams ---------------------------------------------------

def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 generator keyed on ``(seed, stream)``.

    Distinct streams of one seed are statistically independent, which lets
    one operation draw e.g. an initial value and a noise sequence without
    sharing bits.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([_check_seed(seed), stream])))


def trial_seed(seed: int, trial: int) -> int:
    """Seed of trial ``trial`` in a batch run: ``seed + trial`` modulo 2**64."""
    return (_check_seed(seed) + int(trial)) % (SEED_MAX + 1)


def uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform doubles on [0, 1) (53-bit, from the raw bit stream)."""
    return rng.random(n)


def standard_normal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Standard normal draws by the Box-Muller transform.

    Consumes ``2 * ceil(n / 2)`` uniforms; both the cosine and the sine
    branch are used.
    """
    half = (n + 1) // 2
    u = uniform(rng, 2 * half)
    radius = np.sqrt(-2.0 * np.log1p(-u[:half]))
    angle = 2.0 * np.pi * u[half:]
    z = np.empty(2 * half)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:n]


def standard_exponential(rng: np.random.Generator, n: int) -> np.ndarray:
    """Unit-scale exponential draws by inversion, ``-log(1 - u)``."""
    return -np.log1p(-uniform(rng, n))


# -- the logistic map --------------------------------------------------------

def logistic_step(x: float, params: LogisticParams = LogisticParams()) -> float:
    return params.a * x * (1.0 - x)


def logistic_map(x, a: float = 4.0):
    """Vectorised ``a * x * (1 - x)``; no clamping for states outside [0, 1]."""
    return a * x * (1.0 - x)


def random_initial_value(seed: int) -> float:
    """Initial value uniform on the open interval (0, 1)."""
    rng = rng_for(seed, stream=1)
    while True:
        x0 = float(uniform(rng, 1)[0])
        if x0 > 0.0:
            return x0


def generate_trajectory(
    x0: float,
    params: LogisticParams = LogisticParams(),
    length: int = 1098,
    transient: int = 0,
) -> TimeSeries:
    """Iterate the logistic map.

    The map is applied ``transient`` times starting from ``x0`` and the
    following ``length`` states are recorded, the first of them being the
    state reached after the transient.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    if transient < 0:
        raise ValueError("transient must be non-negative")
    if not np.isfinite(x0):
        raise ValueError("x0 must be finite")
    if params.a == 4.0 and not 0.0 <= x0 <= 1.0:
        raise ValueError(f"x0={x0} lies outside [0, 1]; the a=4 trajectory would diverge")
    a = float(params.a)
    x = float(x0)
    for _ in range(transient):
        x = a * x * (1.0 - x)
    out = [0.0] * length
    for i in range(length):
        out[i] = x
        x = a * x * (1.0 - x)
    return TimeSeries(out)


def add_gaussian_noise(series, variance: float, seed: int) -> TimeSeries:
    """Add i.i.d. zero-mean Gaussian noise of the given variance to each sample."""
    if variance < 0:
        raise ValueError("variance must be non-negative")
    x = as_values(series)
    if variance == 0:
        return TimeSeries(x.copy())
    noise = standard_normal(rng_for(seed), x.size)
    return TimeSeries(x + np.sqrt(variance) * noise)


def generate_mimic(
    length: int,
    map_params: LogisticParams = LogisticParams(),
    mimic: MimicParams = MimicParams(),
    seed: int = 0,
    x0: float | None = None,
    return_injected: bool = False,
):
    """Noisy logistic iteration with rare large errors.

    ``x[t+1] = clamp(f(x[t]) + e[t])`` where ``|e[t]|`` is exponential with
    the base scale, or with the anomaly scale with probability
    ``anomaly_prob``, and the sign is a fair coin.

    With ``return_injected=True`` a pair ``(series, injected)`` is
    returned; ``injected[t]`` is the error drawn for the step ``t -> t+1``
    before clamping.
    """
    if length < 2:
        raise ValueError("length must be at least 2")
    rng = rng_for(seed)
    if x0 is None:
        x0 = random_initial_value(seed)
    n = length - 1
    is_anomaly = uniform(rng, n) < mimic.anomaly_prob
    sign = np.where(uniform(rng, n) < 0.5, -1.0, 1.0)
    scale = np.where(is_anomaly, mimic.anomaly_scale, mimic.base_noise_scale)
    injected = sign * scale * standard_exponential(rng, n)

    a = float(map_params.a)
    lo, hi = float(mimic.clamp_low), float(mimic.clamp_high)
    inj = injected.tolist()
    out = [0.0] * length
    x = float(x0)
    out[0] = x
    for t in range(n):
        y = a * x * (1.0 - x) + inj[t]
        x = lo if y < lo else hi if y > hi else y
        out[t + 1] = x
    series = TimeSeries(out)
    if return_injected:
        return series, injected
    return series
