"""Gamma approximation of the optimal-SNR distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import bisect

from ..config import ScenarioConfig
from ..specfun import reg_gamma_p
from .fr import FrResult
from .snr_moments import (
    VarianceTerms,
    _default_fr,
    _resolve_path,
    mean_snr,
    select_y_moments,
    variance_rayleigh,
    variance_terms,
    variance_uncorrelated,
)

__all__ = [
    "gamma_fit",
    "snr_cdf",
    "snr_percentile",
    "to_db",
    "SnrStatistics",
    "snr_statistics",
]

PERCENTILE_RTOL = 1e-6


def gamma_fit(mean: float, variance: float):
    """Moment-matched gamma (shape, scale) = (mean^2/variance, variance/mean)."""
    if not mean > 0 or not variance > 0:
        raise ValueError(f"gamma fit needs positive mean and variance, got {mean}, {variance}")
    return mean * mean / variance, variance / mean


def snr_cdf(x, k_gamma: float, theta_gamma: float):
    """P(SNR <= x) under the gamma approximation; ``x`` may be an array."""
    return reg_gamma_p(k_gamma, x / theta_gamma)


def snr_percentile(p: float, k_gamma: float, theta_gamma: float, rtol: float = PERCENTILE_RTOL) -> float:
    """Linear SNR at which the gamma CDF reaches ``p``, by bisection."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    mean = k_gamma * theta_gamma
    hi = 2.0 * mean
    while snr_cdf(hi, k_gamma, theta_gamma) < p:
        hi *= 2.0
    return bisect(lambda x: snr_cdf(x, k_gamma, theta_gamma) - p, 0.0, hi, xtol=1e-300, rtol=rtol)


def to_db(x):
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SnrStatistics:
    """Analytic summary of the optimal SNR of one scenario.

    ``exact_variance`` is true only when E{Y^3}, E{Y^4} are exact, i.e. for
    independent UE-RIS fading.
    """

    mean: float
    variance: float
    gamma_shape: float
    gamma_scale: float
    exact_variance: bool
    fr: FrResult
    y_moment_method: str
    path: str
    terms: VarianceTerms | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.mean > 0 or not self.variance > 0:
            raise ValueError("SNR statistics need positive mean and variance")

    def cdf(self, x):
        return snr_cdf(x, self.gamma_shape, self.gamma_scale)

    def percentile(self, p: float) -> float:
        return snr_percentile(p, self.gamma_shape, self.gamma_scale)

    def percentile_db(self, p: float) -> float:
        return to_db(self.percentile(p))


def snr_statistics(cfg: ScenarioConfig, fr: FrResult | None = None, path: str = "auto") -> SnrStatistics:
    """Mean, variance and gamma fit of the optimal SNR for ``cfg``."""
    path = _resolve_path(cfg, path)
    if fr is None:
        fr = _default_fr(cfg)
    ym = select_y_moments(cfg, fr)
    mean = mean_snr(cfg, fr, path)
    terms = None
    if path == "rayleigh":
        variance = variance_rayleigh(cfg, fr, ym.c1, ym.c2)
    elif path == "uncorrelated":
        terms = variance_uncorrelated(cfg, fr, ym.c1, ym.c2)
        variance = terms.variance
    else:
        terms = variance_terms(cfg, fr, ym.c1, ym.c2)
        variance = terms.variance
    k, theta = gamma_fit(mean, variance)
    return SnrStatistics(mean, variance, k, theta, ym.exact, fr, ym.method, path, terms)
