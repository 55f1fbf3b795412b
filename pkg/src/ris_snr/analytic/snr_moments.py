"""Closed-form mean and variance of the optimal SNR.

The optimal SNR decomposes as

    SNR / tau = beta_d P + 2 sqrt(beta_d) G Z Y + G^2 M Y^2

with P = ||h_d~||^2, Z = |a_b^H h_d~|, Y = sum_n |h_ru~_n| and
G = sqrt(beta_br beta_ru). The direct-link statistics (P, Z) are independent
of Y, so every moment factors into a direct part and a Y part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..channel_model import scenario_geometry
from ..config import ScenarioConfig
from .fr import FrResult, compute_fr, fr_rayleigh, fr_uncorrelated
from .ricean import curly_i, rice_mean, rice_third, ricean_link, ricean_moment
from .ymoments import (
    DegenerateVarianceError,
    y_mean,
    y_moments_exact_uncorrelated,
    y_moments_gamma_approx,
    y_moments_gamma_rayleigh,
)

__all__ = [
    "DirectLinkStats",
    "VarianceTerms",
    "YMoments",
    "direct_link_stats",
    "mean_snr",
    "mean_snr_general",
    "mean_snr_uncorrelated",
    "mean_snr_rayleigh",
    "variance_terms",
    "variance_uncorrelated",
    "variance_rayleigh",
    "select_y_moments",
    "snr_variance",
]

_SQRT_PI = math.sqrt(math.pi)
_PATHS = ("auto", "general", "uncorrelated", "rayleigh")


def _fr_value(fr):
    return float(getattr(fr, "value", fr))


def _safe_c(kappa, ab_ad_sq, A2):
    if ab_ad_sq == 0.0:
        return 0.0
    return kappa * ab_ad_sq / A2


# ----------------------------------------------------------------------------
# Direct-link statistics
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectLinkStats:
    """Moments of P and Z for one UE-BS link.

    ``m_Z`` = E{Z}, ``E_Z2`` = E{Z^2}, ``E_PZ`` = E{P Z}, ``var_P`` = Var{P}.
    """

    M: int
    A: float
    B: float
    C: float
    L_d: float
    curly_i: complex
    T21: float
    T22: float
    T23: float
    m_Z: float
    E_Z2: float
    E_PZ: float
    var_P: float


def _direct_stats(M, kappa_d, ab_ad, adRab, adRad, trR2, A, B):
    """Direct-link moments from the handful of quadratic forms they depend on.

    ``ab_ad`` = a_b^H a_d, ``adRab`` = a_d^H R_d a_b, ``adRad`` = a_d^H R_d a_d,
    ``trR2`` = tr{R_d^2}, ``A`` = ||R_d^{1/2} a_b|| and ``B`` = ||R_d a_b||^2 / A^2.
    """
    if not A > 0:
        raise ValueError("a_b lies in the null space of R_d (A = 0)")
    eta, zeta = ricean_link(kappa_d)
    # a_b^H h_d~ = A (b + zeta x) with x ~ CN(0, 1)
    b = eta * ab_ad / A
    nb = abs(b)
    EW = rice_mean(nb, zeta)
    E3 = rice_third(nb, zeta)
    cI = curly_i(zeta, b)
    T21 = B * (E3 - 2 * (np.conj(b) * cI).real + nb * nb * EW) + zeta**2 * (M - B) * EW
    T22 = 2 * eta / A * (adRab * (cI - b * EW)).real
    T23 = eta**2 * M * EW
    return DirectLinkStats(
        M=M,
        A=A,
        B=B,
        C=_safe_c(kappa_d, abs(ab_ad) ** 2, A * A),
        L_d=EW / (_SQRT_PI / 2),
        curly_i=complex(cI),
        T21=float(T21),
        T22=float(T22),
        T23=float(T23),
        m_Z=A * EW,
        E_Z2=eta**2 * abs(ab_ad) ** 2 + zeta**2 * A * A,
        E_PZ=float(A * (T21 + T22 + T23)),
        var_P=zeta**2 * (2 * eta**2 * adRad + zeta**2 * trR2),
    )


def direct_link_stats(cfg: ScenarioConfig) -> DirectLinkStats:
    """Direct-link moments for the correlated UE-BS channel of ``cfg``."""
    geo = scenario_geometry(cfg)
    R = geo.R_d.R
    a_b, a_d = geo.a_b, geo.a_d
    Ra = R @ a_b
    A2 = float(np.vdot(a_b, Ra).real)
    A = math.sqrt(max(A2, 0.0))
    return _direct_stats(
        geo.M,
        cfg.kappa_d,
        complex(np.vdot(a_b, a_d)),
        complex(np.vdot(a_d, Ra)),
        float(np.vdot(a_d, R @ a_d).real),
        float(np.sum(np.abs(R) ** 2)),
        A,
        float(np.vdot(Ra, Ra).real) / A2 if A2 > 0 else 0.0,
    )


def _direct_stats_uncorrelated(cfg: ScenarioConfig) -> DirectLinkStats:
    """Same moments with R_d = I substituted (A = sqrt(M), B = 1)."""
    geo = scenario_geometry(cfg)
    M = geo.M
    ab_ad = complex(np.vdot(geo.a_b, geo.a_d))
    return _direct_stats(M, cfg.kappa_d, ab_ad, ab_ad.conjugate(), float(M), float(M), math.sqrt(M), 1.0)


# ----------------------------------------------------------------------------
# Mean
# ----------------------------------------------------------------------------

def _gains(cfg):
    return math.sqrt(cfg.beta_br * cfg.beta_ru)


def _mean_from(cfg, d: DirectLinkStats, F):
    N = cfg.N
    G = _gains(cfg)
    m_Y = y_mean(N, cfg.kappa_ru)
    return cfg.tau_bar * (cfg.beta_d * d.M + 2 * math.sqrt(cfg.beta_d) * G * d.m_Z * m_Y
                          + G * G * d.M * (N + F))


def mean_snr_general(cfg: ScenarioConfig, fr: FrResult | float | None = None) -> float:
    """Mean SNR for correlated Ricean UE-BS and UE-RIS links."""
    if fr is None:
        fr = _default_fr(cfg)
    return _mean_from(cfg, direct_link_stats(cfg), _fr_value(fr))


def mean_snr_uncorrelated(cfg: ScenarioConfig, fr: FrResult | float | None = None) -> float:
    """Mean SNR for independent Ricean fading (R_d = I, R_ru = I)."""
    if fr is None:
        fr = fr_uncorrelated(cfg.N, cfg.kappa_ru)
    return _mean_from(cfg, _direct_stats_uncorrelated(cfg), _fr_value(fr))


def mean_snr_rayleigh(cfg: ScenarioConfig, fr: FrResult | float | None = None) -> float:
    """Mean SNR for correlated Rayleigh fading on both UE links."""
    if cfg.kappa_d != 0 or cfg.kappa_ru != 0:
        raise ValueError("Rayleigh closed form needs kappa_d = kappa_ru = 0")
    geo = scenario_geometry(cfg)
    if fr is None:
        fr = fr_rayleigh(geo.R_ru.R)
    F = _fr_value(fr)
    M, N = cfg.M, cfg.N
    A = math.sqrt(float(np.vdot(geo.a_b, geo.R_d.R @ geo.a_b).real))
    root = math.sqrt(cfg.beta_d * cfg.beta_br * cfg.beta_ru)
    return cfg.tau_bar * (cfg.beta_d * M + N * A * math.pi * root / 2
                          + cfg.beta_br * cfg.beta_ru * M * (N + F))


def _resolve_path(cfg, path):
    if path not in _PATHS:
        raise ValueError(f"unknown path {path!r}; expected one of {_PATHS}")
    if path != "auto":
        return path
    if cfg.rho_d == 0 and cfg.rho_ru == 0:
        return "uncorrelated"
    if cfg.kappa_d == 0 and cfg.kappa_ru == 0:
        return "rayleigh"
    return "general"


def _default_fr(cfg):
    geo = scenario_geometry(cfg)
    return compute_fr(geo.R_ru.R, geo.a_ru, cfg.kappa_ru)


def mean_snr(cfg: ScenarioConfig, fr: FrResult | float | None = None, path: str = "auto") -> float:
    """Mean optimal SNR (linear).

    ``path="auto"`` uses the independent-fading form when both correlation
    coefficients vanish, the Rayleigh form when both K-factors vanish and the
    general correlated Ricean form otherwise. All paths agree where they overlap.
    """
    path = _resolve_path(cfg, path)
    if path == "uncorrelated":
        return mean_snr_uncorrelated(cfg, fr)
    if path == "rayleigh":
        return mean_snr_rayleigh(cfg, fr)
    return mean_snr_general(cfg, fr)


# ----------------------------------------------------------------------------
# Variance
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class VarianceTerms:
    """Sub-terms of the SNR variance.

    T1..T6 are the expectations of the six cross terms of SNR^2 (before the
    tau_bar^2 factor), so ``variance = tau^2 sum(T) - mean^2``. The variance
    itself is assembled from the centred grouping, which avoids that
    subtraction.
    """

    T1: float
    T2: float
    T3: float
    T4: float
    T5: float
    T6: float
    T21: float
    T22: float
    T23: float
    A: float
    B: float
    C: float
    L_ru: float
    L_d: float
    curly_i: complex
    C1: float
    C2: float
    mean: float
    variance: float

    @property
    def raw_second_moment(self) -> float:
        """sum(T1..T6), i.e. E{SNR^2} / tau^2."""
        return math.fsum((self.T1, self.T2, self.T3, self.T4, self.T5, self.T6))


def _variance_from(cfg, d: DirectLinkStats, F, c1, c2) -> VarianceTerms:
    M, N = d.M, cfg.N
    bd = cfg.beta_d
    G = _gains(cfg)
    tau = cfg.tau_bar
    m1 = ricean_moment(1, cfg.kappa_ru)
    m_Y = N * m1
    s2 = N + F  # E{Y^2}
    terms = dict(
        T1=bd * bd * (d.var_P + M * M),
        T2=4 * bd**1.5 * G * m_Y * d.E_PZ,
        T3=2 * bd * G * G * M * M * s2,
        T4=4 * bd * G * G * s2 * d.E_Z2,
        T5=4 * M * math.sqrt(bd) * G**3 * d.m_Z * c1,
        T6=M * M * G**4 * c2,
    )
    centred = (
        bd * bd * d.var_P
        + 4 * bd**1.5 * G * m_Y * (d.E_PZ - M * d.m_Z)
        + 4 * bd * G * G * (s2 * d.E_Z2 - m_Y * m_Y * d.m_Z * d.m_Z)
        + 4 * math.sqrt(bd) * M * G**3 * d.m_Z * (c1 - m_Y * s2)
        + M * M * G**4 * (c2 - s2 * s2)
    )
    return VarianceTerms(
        **terms,
        T21=d.T21,
        T22=d.T22,
        T23=d.T23,
        A=d.A,
        B=d.B,
        C=d.C,
        L_ru=m1 / (_SQRT_PI / 2),
        L_d=d.L_d,
        curly_i=d.curly_i,
        C1=float(c1),
        C2=float(c2),
        mean=_mean_from(cfg, d, F),
        variance=tau * tau * centred,
    )


def variance_terms(cfg: ScenarioConfig, fr: FrResult | float, c1: float, c2: float) -> VarianceTerms:
    """Variance sub-terms for the general correlated Ricean channel.

    ``c1`` and ``c2`` are E{Y^3} and E{Y^4}, exact or approximated.
    """
    return _variance_from(cfg, direct_link_stats(cfg), _fr_value(fr), c1, c2)


def variance_uncorrelated(cfg: ScenarioConfig, fr: FrResult | float | None = None,
                          c1: float | None = None, c2: float | None = None) -> VarianceTerms:
    """Variance for independent Ricean fading, with exact Y moments by default."""
    if fr is None:
        fr = fr_uncorrelated(cfg.N, cfg.kappa_ru)
    if c1 is None or c2 is None:
        c1, c2 = y_moments_exact_uncorrelated(cfg.N, cfg.kappa_ru)
    return _variance_from(cfg, _direct_stats_uncorrelated(cfg), _fr_value(fr), c1, c2)


def variance_rayleigh(cfg: ScenarioConfig, fr: FrResult | float | None = None,
                      c1: float | None = None, c2: float | None = None) -> float:
    """SNR variance for correlated Rayleigh fading on both UE links."""
    if cfg.kappa_d != 0 or cfg.kappa_ru != 0:
        raise ValueError("Rayleigh closed form needs kappa_d = kappa_ru = 0")
    geo = scenario_geometry(cfg)
    if fr is None:
        fr = fr_rayleigh(geo.R_ru.R)
    F = _fr_value(fr)
    M, N = cfg.M, cfg.N
    if c1 is None or c2 is None:
        c1, c2 = y_moments_gamma_rayleigh(N, F)
    R = geo.R_d.R
    Ra = R @ geo.a_b
    A = math.sqrt(float(np.vdot(geo.a_b, Ra).real))
    B_prime = M * A + float(np.vdot(Ra, Ra).real) / (2 * A)
    trR2 = float(np.sum(np.abs(R) ** 2))
    bd = cfg.beta_d
    G = _gains(cfg)
    s2 = N + F
    pi = math.pi
    v = (bd * bd * trR2
         + bd**1.5 * G * N * pi * (B_prime - M * A)
         + bd * G * G * A * A * (4 * s2 - N * N * pi * pi / 4)
         + M * A * math.sqrt(bd) * G**3 * (2 * _SQRT_PI * c1 - N * pi * s2)
         + (M * G * G) ** 2 * (c2 - s2 * s2))
    return cfg.tau_bar**2 * v


# ----------------------------------------------------------------------------
# Y-moment selection
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class YMoments:
    c1: float
    c2: float
    exact: bool
    method: str


def select_y_moments(cfg: ScenarioConfig, fr: FrResult | float) -> YMoments:
    """E{Y^3}, E{Y^4}: exact for independent UE-RIS fading, gamma-matched otherwise.

    When the fitted Var{Y} is not positive the deterministic-Y limit
    (E{Y}^3, E{Y}^4) is used.
    """
    N, k = cfg.N, cfg.kappa_ru
    if cfg.rho_ru == 0 or N == 1:
        c1, c2 = y_moments_exact_uncorrelated(N, k)
        return YMoments(c1, c2, True, "exact")
    try:
        c1, c2 = y_moments_gamma_approx(N, fr, k)
        return YMoments(c1, c2, False, "gamma")
    except DegenerateVarianceError:
        m = y_mean(N, k)
        return YMoments(m**3, m**4, False, "deterministic")


def snr_variance(cfg: ScenarioConfig, fr: FrResult | float | None = None, path: str = "auto") -> float:
    """SNR variance (linear) with automatically selected Y moments."""
    path = _resolve_path(cfg, path)
    if fr is None:
        fr = _default_fr(cfg)
    ym = select_y_moments(cfg, fr)
    if path == "rayleigh":
        return variance_rayleigh(cfg, fr, ym.c1, ym.c2)
    if path == "uncorrelated":
        return variance_uncorrelated(cfg, fr, ym.c1, ym.c2).variance
    return variance_terms(cfg, fr, ym.c1, ym.c2).variance
