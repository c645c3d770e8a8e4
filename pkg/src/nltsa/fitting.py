"""Maximum-likelihood fits of error-magnitude distributions, their
analytic CCDFs, and ordinary/weighted least-squares lines."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

__all__ = [
    "Family",
    "DistributionFit",
    "LinearFit",
    "NumericalFailure",
    "DegenerateInputError",
    "fit_folded_gaussian",
    "fit_exponential",
    "fit_gamma",
    "fit_lognormal",
    "fit_all",
    "folded_gaussian_ccdf",
    "analytic_ccdf",
    "log_likelihood",
    "least_squares_slope",
]


class NumericalFailure(ArithmeticError):
    pass


class DegenerateInputError(ValueError):
    pass


class Family(str, Enum):
    FOLDED_GAUSSIAN = "folded_gaussian"
    EXPONENTIAL = "exponential"
    GAMMA = "gamma"
    LOGNORMAL = "lognormal"


@dataclass(frozen=True)
class DistributionFit:
    """A fitted family.  ``params`` keys by family:

    * folded_gaussian: ``variance``
    * exponential: ``rate``
    * gamma: ``shape``, ``scale``
    * lognormal: ``mu``, ``sigma`` (of the log)
    """

    family: Family
    params: dict
    log_likelihood: float
    n_samples: int = 0
    n_excluded: int = 0


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    residual_rms: float
    r_squared: float = float("nan")


def _positive(samples) -> np.ndarray:
    d = np.asarray(samples, dtype=np.float64).reshape(-1)
    if d.size == 0:
        raise ValueError("no samples")
    if np.any(~np.isfinite(d)) or np.any(d <= 0):
        raise ValueError("samples must be finite and strictly positive")
    return d


# -- log-likelihoods ---------------------------------------------------------

def _ll_folded_gaussian(d, variance):
    return float(np.sum(0.5 * np.log(2.0 / (np.pi * variance)) - d * d / (2.0 * variance)))


def _ll_exponential(d, rate):
    return float(d.size * np.log(rate) - rate * np.sum(d))


def _ll_gamma(d, shape, scale):
    return float(
        np.sum((shape - 1.0) * np.log(d) - d / scale) - d.size * (special.gammaln(shape) + shape * np.log(scale))
    )


def _ll_lognormal(d, mu, sigma):
    z = (np.log(d) - mu) / sigma
    return float(np.sum(-np.log(d) - np.log(sigma) - 0.5 * np.log(2.0 * np.pi) - 0.5 * z * z))


def log_likelihood(family, params: dict, samples) -> float:
    """Log-likelihood of non-negative magnitudes under a family."""
    family = Family(family)
    d = np.asarray(samples, dtype=np.float64).reshape(-1)
    if family is Family.FOLDED_GAUSSIAN:
        return _ll_folded_gaussian(np.abs(d), params["variance"])
    if family is Family.EXPONENTIAL:
        return _ll_exponential(d, params["rate"])
    if family is Family.GAMMA:
        return _ll_gamma(d, params["shape"], params["scale"])
    return _ll_lognormal(d, params["mu"], params["sigma"])


# -- fits ------------------------------------------------------------------

def fit_folded_gaussian(e_samples) -> DistributionFit:
    """Zero-mean Gaussian for signed errors with variance = mean of squares;
    the likelihood is that of ``|e|`` under the folded distribution."""
    e = np.asarray(e_samples, dtype=np.float64).reshape(-1)
    if e.size < 2:
        raise ValueError("need at least 2 samples")
    variance = float(np.mean(e * e))
    if variance == 0.0:
        raise DegenerateInputError("all samples are zero; variance is zero")
    return DistributionFit(
        Family.FOLDED_GAUSSIAN,
        {"variance": variance},
        _ll_folded_gaussian(np.abs(e), variance),
        n_samples=e.size,
    )


def fit_exponential(d_samples) -> DistributionFit:
    d = _positive(d_samples)
    rate = 1.0 / float(np.mean(d))
    return DistributionFit(Family.EXPONENTIAL, {"rate": rate}, _ll_exponential(d, rate), n_samples=d.size)


def fit_gamma(d_samples, tol: float = 1e-10, max_iter: int = 100) -> DistributionFit:
    """Gamma MLE.

    Newton iteration on ``log(k) - digamma(k) = log(mean) - mean(log)``,
    started from Minka's closed-form approximation; stops when the relative
    step is at most ``tol``.  The scale is ``mean / k``.
    """
    d = _positive(d_samples)
    if d.size < 2:
        raise ValueError("need at least 2 samples")
    mean = float(np.mean(d))
    s = np.log(mean) - float(np.mean(np.log(d)))
    if not s > 0:
        raise DegenerateInputError("samples are all equal; gamma shape diverges")
    k = (3.0 - s + np.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(max_iter):
        g = np.log(k) - special.digamma(k) - s
        dg = 1.0 / k - special.polygamma(1, k)
        step = g / dg
        k_new = k - step
        if k_new <= 0:
            k_new = k / 2.0
        converged = abs(k_new - k) <= tol * k_new
        k = k_new
        if converged:
            break
    else:
        raise NumericalFailure(f"gamma shape iteration did not converge in {max_iter} steps")
    shape, scale = float(k), mean / float(k)
    return DistributionFit(
        Family.GAMMA, {"shape": shape, "scale": scale}, _ll_gamma(d, shape, scale), n_samples=d.size
    )


def fit_lognormal(d_samples) -> DistributionFit:
    d = _positive(d_samples)
    if d.size < 2:
        raise ValueError("need at least 2 samples")
    logs = np.log(d)
    mu = float(np.mean(logs))
    sigma = float(np.sqrt(np.mean((logs - mu) ** 2)))
    ll = _ll_lognormal(d, mu, sigma) if sigma > 0 else float("inf")
    return DistributionFit(Family.LOGNORMAL, {"mu": mu, "sigma": sigma}, ll, n_samples=d.size)


def fit_all(e_samples) -> dict:
    """Fit all four families to transition errors.

    The folded Gaussian uses the signed errors; the other families use
    the strictly positive magnitudes, exact zeros being excluded and
    counted in ``n_excluded``.
    """
    e = np.asarray(e_samples, dtype=np.float64).reshape(-1)
    d = np.abs(e)
    pos = d[d > 0]
    excluded = int(d.size - pos.size)
    fits = {}
    if np.any(e != 0):
        fits[Family.FOLDED_GAUSSIAN] = fit_folded_gaussian(e)
    if pos.size >= 2:
        for family, fitter in (
            (Family.EXPONENTIAL, fit_exponential),
            (Family.GAMMA, fit_gamma),
            (Family.LOGNORMAL, fit_lognormal),
        ):
            try:
                f = fitter(pos)
            except DegenerateInputError:
                continue
            fits[family] = DistributionFit(f.family, f.params, f.log_likelihood, f.n_samples, excluded)
    return fits


# -- analytic CCDFs ----------------------------------------------------------

def folded_gaussian_ccdf(d, variance: float):
    """``P(|e| >= d)`` for ``e ~ N(0, variance)``, i.e. ``erfc(d / (sigma*sqrt(2)))``."""
    d = np.asarray(d, dtype=np.float64)
    out = special.erfc(d / np.sqrt(2.0 * variance))
    return float(out) if out.ndim == 0 else out


def analytic_ccdf(fit: DistributionFit, d):
    d = np.asarray(d, dtype=np.float64)
    p = fit.params
    if fit.family is Family.FOLDED_GAUSSIAN:
        return folded_gaussian_ccdf(d, p["variance"])
    if fit.family is Family.EXPONENTIAL:
        out = np.exp(-p["rate"] * d)
    elif fit.family is Family.GAMMA:
        out = special.gammaincc(p["shape"], d / p["scale"])
        if p["shape"] == 1.0:
            out = np.exp(-d / p["scale"])
    else:
        with np.errstate(divide="ignore"):
            z = (np.log(d) - p["mu"]) / p["sigma"]
        out = np.where(d > 0, special.ndtr(-z), 1.0)
    out = np.asarray(out, dtype=np.float64)
    return float(out) if out.ndim == 0 else out


# -- least squares -----------------------------------------------------------

def least_squares_slope(points, weights=None) -> LinearFit:
    """Least-squares line through ``(x, y)`` points, optionally weighted.

    ``residual_rms`` is the (weighted) root-mean-square residual and
    ``r_squared`` the (weighted) coefficient of determination.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    if x.size < 2 or np.all(x == x[0]):
        raise ValueError("need at least two distinct x values")
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != x.shape or np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be non-negative, one per point")
    sw = w.sum()
    xm, ym = np.dot(w, x) / sw, np.dot(w, y) / sw
    dx, dy = x - xm, y - ym
    sxx = np.dot(w, dx * dx)
    slope = float(np.dot(w, dx * dy) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (slope * x + intercept)
    ss_res = float(np.dot(w, resid * resid))
    ss_tot = float(np.dot(w, dy * dy))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else float("nan"))
    return LinearFit(slope, intercept, float(np.sqrt(ss_res / sw)), r2)
