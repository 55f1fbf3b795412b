"""Qualitative behaviour of the mean SNR and the favourable/unfavourable gain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel_model import scenario_geometry
from .config import ScenarioConfig
from .specfun import laguerre_nu

__all__ = [
    "QBehavior",
    "GainCoefficients",
    "GainCurve",
    "GAIN_LIMIT",
    "q_func",
    "classify_q",
    "mean_snr_favourable",
    "mean_snr_unfavourable",
    "gain_coefficients",
    "gain_fav_unfav",
    "gain_curve",
    "optimal_gain_n",
]

GAIN_LIMIT = (4 - math.pi) / math.pi


@dataclass(frozen=True)
class QBehavior:
    """Shape of q(alpha, x) = L_{1/2}(-alpha x) / sqrt(1 + x) in x."""

    increases_at_origin: bool
    positive_gradient_at_infinity: bool
    limit_ge_one: bool
    asymptote: float


def q_func(alpha, x):
    """q(alpha, x); vectorised over ``x``."""
    if np.any(np.asarray(alpha) < 0) or np.any(np.asarray(x) < 0):
        raise ValueError("q(alpha, x) needs alpha, x >= 0")
    return laguerre_nu(0.5, -np.multiply(alpha, x)) / np.sqrt(1.0 + np.asarray(x, dtype=float))


def classify_q(alpha: float) -> QBehavior:
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return QBehavior(
        increases_at_origin=alpha >= 1.0,
        positive_gradient_at_infinity=alpha >= 0.5,
        limit_ge_one=alpha >= math.pi / 4,
        asymptote=2 * math.sqrt(alpha / math.pi),
    )


# ----------------------------------------------------------------------------
# Favourable / unfavourable scenarios
# ----------------------------------------------------------------------------

def _ab_ad(cfg):
    geo = scenario_geometry(cfg)
    return abs(complex(np.vdot(geo.a_b, geo.a_d)))


def mean_snr_favourable(cfg: ScenarioConfig, n: int | None = None) -> float:
    """Mean SNR with i.i.d. Rayleigh UE-BS and pure LOS UE-RIS links."""
    N = cfg.N if n is None else n
    M = cfg.M
    root = math.sqrt(cfg.beta_d * cfg.beta_br * cfg.beta_ru)
    return (cfg.beta_d * M + N * math.sqrt(M * math.pi) * root + cfg.beta_br * cfg.beta_ru * M * N * N) * cfg.tau_bar


def mean_snr_unfavourable(cfg: ScenarioConfig, n: int | None = None) -> float:
    """Mean SNR with pure LOS UE-BS and i.i.d. Rayleigh UE-RIS links."""
    N = cfg.N if n is None else n
    M = cfg.M
    root = math.sqrt(cfg.beta_d * cfg.beta_br * cfg.beta_ru)
    return (cfg.beta_d * M + N * math.sqrt(math.pi) * _ab_ad(cfg) * root
            + cfg.beta_br * cfg.beta_ru * M * (N + math.pi * N * (N - 1) / 4)) * cfg.tau_bar


@dataclass(frozen=True)
class GainCoefficients:
    """gain(N) = (D1 N^2 + D2 N) / (D3 N^2 + D4 N + D5)."""

    D1: float
    D2: float
    D3: float
    D4: float
    D5: float

    def gain(self, n):
        n = np.asarray(n, dtype=float)
        return (self.D1 * n * n + self.D2 * n) / (self.D3 * n * n + self.D4 * n + self.D5)

    def critical_points(self):
        """Real roots of the numerator of d gain / dN."""
        a = self.D1 * self.D4 - self.D2 * self.D3
        b = 2 * self.D1 * self.D5
        c = self.D2 * self.D5
        if a == 0:
            return [] if b == 0 else [-c / b]
        roots = np.roots([a, b, c])
        return [float(r.real) for r in roots if abs(r.imag) <= 1e-12 * max(1.0, abs(r.real))]


def gain_coefficients(cfg: ScenarioConfig) -> GainCoefficients:
    M = cfg.M
    G2 = cfg.beta_br * cfg.beta_ru
    G = math.sqrt(G2)
    s = math.sqrt(math.pi * cfg.beta_d) * G
    ab = _ab_ad(cfg)
    c = G2 * M * (1 - math.pi / 4)
    return GainCoefficients(
        D1=c,
        D2=s * (math.sqrt(M) - ab) - c,
        D3=G2 * M * math.pi / 4,
        D4=s * ab + c,
        D5=cfg.beta_d * M,
    )


def gain_fav_unfav(cfg: ScenarioConfig, n: int) -> float:
    """Relative mean-SNR gain of the favourable over the unfavourable scenario at N = n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    fav = mean_snr_favourable(cfg, n)
    unfav = mean_snr_unfavourable(cfg, n)
    return (fav - unfav) / unfav


@dataclass(frozen=True)
class GainCurve:
    n_values: list
    gains: list
    limit: float
    argmax_n: int


def gain_curve(cfg: ScenarioConfig, n_values) -> GainCurve:
    n_values = [int(n) for n in n_values]
    gains = [gain_fav_unfav(cfg, n) for n in n_values]
    best = n_values[int(np.argmax(gains))]
    return GainCurve(n_values, gains, GAIN_LIMIT, best)


def optimal_gain_n(cfg: ScenarioConfig, n_max: int) -> int:
    """Integer N in [1, n_max] maximising the gain.

    Candidates are the range endpoints and the integers either side of each
    stationary point of the rational gain curve; ties go to the smaller N.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    coef = gain_coefficients(cfg)
    cands = {1, n_max}
    for r in coef.critical_points():
        for n in (math.floor(r), math.ceil(r)):
            if 1 <= n <= n_max:
                cands.add(int(n))
    cands = sorted(cands)
    gains = [gain_fav_unfav(cfg, n) for n in cands]
    return cands[int(np.argmax(gains))]
