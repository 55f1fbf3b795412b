"""Closed-form moment machinery for the optimal RIS-assisted SNR."""

from .distribution import SnrStatistics, gamma_fit, snr_cdf, snr_percentile, snr_statistics, to_db
from .fr import (
    FrMethod,
    FrResult,
    QuadratureSpec,
    compute_fr,
    fr_integral,
    fr_perfect_corr,
    fr_rayleigh,
    fr_series,
    fr_uncorrelated,
    pair_moment_integral,
    pair_moment_series,
    select_fr_method,
)
from .ricean import curly_i, rice_mean, rice_third, ricean_link, ricean_moment
from .snr_moments import (
    VarianceTerms,
    direct_link_stats,
    mean_snr,
    mean_snr_general,
    mean_snr_rayleigh,
    mean_snr_uncorrelated,
    select_y_moments,
    snr_variance,
    variance_rayleigh,
    variance_terms,
    variance_uncorrelated,
)
from .ymoments import (
    DegenerateVarianceError,
    y_moment_comparison,
    y_moments_exact_uncorrelated,
    y_moments_gamma_approx,
    y_moments_gamma_rayleigh,
    y_moments_printed_uncorrelated,
)

__all__ = [name for name in dir() if not name.startswith("_")]
