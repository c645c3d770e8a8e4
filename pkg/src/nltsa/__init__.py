"""Nonlinear time-series analysis: logistic-map generators, delay
embedding, Wayland determinism test, surrogate data, Kantz Lyapunov
estimation and anomalous-transition statistics."""

__version__ = "0.1.0"

from .series import (  # noqa: E402
    LogisticParams,
    MimicParams,
    TimeSeries,
    add_gaussian_noise,
    generate_mimic,
    generate_trajectory,
    logistic_step,
    random_initial_value,
)
from .embedding import EmbeddingSet, delay_embed, k_nearest, radius_neighbors  # noqa: E402
from .determinism import WaylandConfig, WaylandResult, translation_error, wayland_statistic  # noqa: E402
from .surrogate import SurrogateKind, aaft_surrogate, ft_surrogate, random_shuffle_surrogate  # noqa: E402
from .lyapunov import KantzConfig, StretchingCurve, estimate_lyapunov, stretching_curve  # noqa: E402
from .anomaly import ccdf, detect_events, interval_histogram, transition_errors  # noqa: E402
from .fitting import (  # noqa: E402
    fit_all,
    analytic_ccdf,
    fit_exponential,
    fit_folded_gaussian,
    fit_gamma,
    fit_lognormal,
    least_squares_slope,
)
