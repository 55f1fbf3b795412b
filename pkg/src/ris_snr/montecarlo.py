"""Monte-Carlo oracle for the optimal SNR.

Trials are grouped in fixed-size blocks; block ``j`` always draws from the
stream seeded by ``(seed, j)``, so results depend only on ``(seed, trials)``
and never on how many workers evaluated the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic.distribution import snr_cdf
from .channel_model import scenario_geometry, sample_channel_batch
from .config import ScenarioConfig
from .ris_core import optimal_snr_batch

__all__ = [
    "SnrSampleStats",
    "BLOCK_SIZE",
    "ECDF_MAX_SAMPLES",
    "DEFAULT_QUANTILES",
    "block_rng",
    "simulate_block",
    "simulate_samples",
    "simulate",
    "empirical_cdf",
    "quantile",
    "ks_distance",
    "ks_statistic",
]

BLOCK_SIZE = 8192
ECDF_MAX_SAMPLES = 10**6
DEFAULT_QUANTILES = (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95)


@dataclass(frozen=True, eq=False)
class SnrSampleStats:
    """Aggregates over ``trials`` simulated optimal SNRs (linear).

    ``ecdf`` holds the sorted sample buffer, thinned to at most
    ``ECDF_MAX_SAMPLES`` points for very long runs.
    """

    trials: int
    mean: float
    variance: float
    quantiles: dict
    ecdf: np.ndarray = field(repr=False)
    seed: int

    def __eq__(self, other):
        if not isinstance(other, SnrSampleStats):
            return NotImplemented
        return (self.trials == other.trials and self.seed == other.seed and self.mean == other.mean
                and self.variance == other.variance and self.quantiles == other.quantiles
                and np.array_equal(self.ecdf, other.ecdf))

    __hash__ = None


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(block)])


def simulate_block(cfg: ScenarioConfig, seed: int, block: int, size: int) -> np.ndarray:
    """Optimal SNRs for one block of trials."""
    geo = scenario_geometry(cfg)
    hd, hru = sample_channel_batch(geo, block_rng(seed, block), size)
    return optimal_snr_batch(hd, hru, geo.a_b, geo.direct.beta, geo.cascade_gain, geo.tau_bar)


def _block_sizes(trials, block_size):
    full, rest = divmod(trials, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _run_blocks(cfg, trials, seed, workers, block_size):
    sizes = _block_sizes(trials, block_size)
    jobs = list(enumerate(sizes))
    if workers <= 1:
        return [simulate_block(cfg, seed, j, n) for j, n in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves block order, so the merge below is worker-independent
        return list(pool.map(lambda job: simulate_block(cfg, seed, *job), jobs))


def simulate_samples(cfg: ScenarioConfig, trials: int, seed: int, workers: int = 1,
                     block_size: int = BLOCK_SIZE) -> np.ndarray:
    """Raw SNR samples in trial order."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    return np.concatenate(_run_blocks(cfg, trials, seed, workers, block_size))


def _merge(n_a, mean_a, m2_a, n_b, mean_b, m2_b):
    n = n_a + n_b
    delta = mean_b - mean_a
    mean = mean_a + delta * n_b / n
    m2 = m2_a + m2_b + delta * delta * n_a * n_b / n
    return n, mean, m2


def simulate(cfg: ScenarioConfig, trials: int, seed: int | None = None, workers: int = 1,
             quantile_probs=DEFAULT_QUANTILES, block_size: int = BLOCK_SIZE) -> SnrSampleStats:
    """Empirical statistics of the optimal SNR over ``trials`` channel draws."""
    if trials < 2:
        raise ValueError(f"simulate needs at least 2 trials, got {trials}")
    if seed is None:
        seed = cfg.seed
    blocks = _run_blocks(cfg, trials, seed, workers, block_size)
    n, mean, m2 = 0, 0.0, 0.0
    for x in blocks:
        mb = float(np.mean(x))
        m2b = float(np.sum((x - mb) ** 2))
        n, mean, m2 = _merge(n, mean, m2, x.size, mb, m2b)
    samples = np.sort(np.concatenate(blocks))
    q = dict(zip(quantile_probs, (float(v) for v in np.quantile(samples, quantile_probs))))
    step = math.ceil(trials / ECDF_MAX_SAMPLES)
    buf = samples[step - 1::step] if step > 1 else samples
    buf.setflags(write=False)
    return SnrSampleStats(trials=trials, mean=mean, variance=m2 / (n - 1), quantiles=q, ecdf=buf, seed=seed)


def empirical_cdf(stats: SnrSampleStats, x):
    """Right-continuous ECDF of the sample buffer at ``x``."""
    grid = stats.ecdf
    out = np.searchsorted(grid, x, side="right") / grid.size
    return float(out) if np.ndim(out) == 0 else out


def quantile(stats: SnrSampleStats, p: float) -> float:
    return float(np.quantile(stats.ecdf, p))


def ks_statistic(sorted_samples, cdf_values) -> float:
    """sup |ECDF - F| given sorted samples and F evaluated at them."""
    n = len(sorted_samples)
    F = np.asarray(cdf_values, dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_distance(stats: SnrSampleStats, k_gamma: float, theta_gamma: float) -> float:
    """Kolmogorov-Smirnov distance between the samples and a gamma(k, theta) law."""
    return ks_statistic(stats.ecdf, snr_cdf(stats.ecdf, k_gamma, theta_gamma))
