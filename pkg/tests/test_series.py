import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nltsa.series import (
    LogisticParams,
    MimicParams,
    TimeSeries,
    add_gaussian_noise,
    generate_mimic,
    generate_trajectory,
    logistic_step,
    random_initial_value,
    standard_normal,
    rng_for,
    trial_seed,
)


@pytest.mark.parametrize("x, expected", [(0.5, 1.0), (0.0, 0.0), (0.75, 0.75)])
def test_logistic_step(x, expected):
    assert logistic_step(x, LogisticParams(4.0)) == expected


def test_logistic_params_range():
    with pytest.raises(ValueError):
        LogisticParams(0.0)
    with pytest.raises(ValueError):
        LogisticParams(4.1)


def test_timeseries_rejects_non_finite():
    with pytest.raises(ValueError):
        TimeSeries([0.1, float("nan")])
    with pytest.raises(ValueError):
        TimeSeries([])


def test_trajectory_direct_iteration():
    assert list(generate_trajectory(0.5, LogisticParams(4.0), 3, 0)) == [0.5, 1.0, 0.0]


def test_trajectory_fixed_point_after_transient():
    assert list(generate_trajectory(0.75, LogisticParams(4.0), 4, 10)) == [0.75] * 4


def test_trajectory_return_map():
    x = generate_trajectory(0.2, LogisticParams(4.0), 1098, 0).values
    oracle = [4.0 * v * (1.0 - v) for v in x[:-1].tolist()]
    assert np.max(np.abs(np.array(oracle) - x[1:])) <= 1e-12


def test_trajectory_rejects_bad_x0():
    with pytest.raises(ValueError):
        generate_trajectory(1.5, LogisticParams(4.0), 10)
    with pytest.raises(ValueError):
        generate_trajectory(0.5, LogisticParams(4.0), 0)


@settings(max_examples=50, deadline=None)
@given(x0=st.floats(0.0, 1.0), length=st.integers(2, 300))
def test_trajectory_bounded_and_prefix(x0, length):
    full = generate_trajectory(x0, LogisticParams(4.0), length, 0).values
    assert np.all((full >= 0.0) & (full <= 1.0))
    shorter = generate_trajectory(x0, LogisticParams(4.0), length - 1, 0).values
    assert np.array_equal(full[:-1], shorter)


def test_random_initial_value_in_open_interval():
    vals = [random_initial_value(s) for s in range(200)]
    assert all(0.0 < v < 1.0 for v in vals)
    assert random_initial_value(7) == random_initial_value(7)


def test_noise_zero_variance_is_identity():
    x = generate_trajectory(0.3, LogisticParams(), 50)
    assert add_gaussian_noise(x, 0.0, 3) == x


def test_noise_moments():
    const = TimeSeries(np.full(100_000, 0.5))
    out = add_gaussian_noise(const, 0.0014, 11).values - 0.5
    assert abs(out.mean()) <= 0.001
    assert abs(out.var() / 0.0014 - 1.0) <= 0.05


def test_noise_deterministic():
    x = generate_trajectory(0.3, LogisticParams(), 1000)
    a = add_gaussian_noise(x, 0.0014, 5)
    b = add_gaussian_noise(x, 0.0014, 5)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, add_gaussian_noise(x, 0.0014, 6).values)


def test_box_muller_is_standard_normal():
    z = standard_normal(rng_for(3), 200_001)
    assert z.size == 200_001
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01
    # fourth moment of N(0,1) is 3
    assert abs(np.mean(z**4) - 3.0) < 0.1


def test_trial_seed_derivation():
    assert trial_seed(10, 3) == 13
    assert trial_seed(2**64 - 1, 1) == 0


def test_mimic_params_invariants():
    with pytest.raises(ValueError):
        MimicParams(base_noise_scale=0.3, anomaly_scale=0.2)
    with pytest.raises(ValueError):
        MimicParams(clamp_low=1.0, clamp_high=0.0)
    with pytest.raises(ValueError):
        MimicParams(anomaly_prob=1.0)


def test_mimic_degenerates_to_logistic():
    mp = MimicParams(base_noise_scale=0.0, anomaly_prob=0.0, anomaly_scale=0.2)
    x = generate_mimic(500, LogisticParams(4.0), mp, seed=4, x0=0.3)
    assert np.array_equal(x.values, generate_trajectory(0.3, LogisticParams(4.0), 500).values)


def test_mimic_deterministic():
    a = generate_mimic(5000, seed=9)
    b = generate_mimic(5000, seed=9)
    assert np.array_equal(a.values, b.values)


def mimic_exceedance_rate(threshold, mp: MimicParams):
    """P(d > threshold) for the mimic process with clamping to [0, 1].

    A positive error e is cut to 1 - f(x) and a negative one to f(x), so
    d > threshold needs |e| > threshold and f(x) on the right side of it.
    f(x) follows the invariant arcsine density of the a=4 map, for which
    P(f(x) > u) = 1 - (2/pi) asin(sqrt(u)).
    """
    p = mp.anomaly_prob
    tail = (1 - p) * math.exp(-threshold / mp.base_noise_scale) + p * math.exp(-threshold / mp.anomaly_scale)
    room = 1.0 - 2.0 / math.pi * math.asin(math.sqrt(threshold))
    return tail * room


def test_mimic_exceedance_rate_matches_analytic_oracle():
    mp = MimicParams(base_noise_scale=0.01, anomaly_prob=1e-3, anomaly_scale=0.2)
    x = generate_mimic(100_000, LogisticParams(4.0), mp, seed=2).values
    d = np.abs(4 * x[:-1] * (1 - x[:-1]) - x[1:])
    n = d.size
    q = mimic_exceedance_rate(0.1, mp)
    frac = np.mean(d > 0.1)
    # 99% normal-approximation binomial band
    band = 2.576 * math.sqrt(q * (1 - q) / n)
    assert abs(frac - q) <= band, (frac, q, band)


def test_mimic_records_injected_errors():
    series, inj = generate_mimic(2000, seed=1, return_injected=True)
    assert inj.shape == (1999,)
