import math

import numpy as np
import pytest
from scipy import stats as sps

import ris_snr.montecarlo as mc
from ris_snr.analytic import gamma_fit, mean_snr, snr_cdf
from ris_snr.config import ScenarioConfig
from ris_snr.montecarlo import (
    SnrSampleStats,
    empirical_cdf,
    ks_distance,
    ks_statistic,
    quantile,
    simulate,
    simulate_samples,
)

SMALL = ScenarioConfig(M_y=4, M_z=2, N_y=4, N_z=2)


def _stats_from(samples, seed=0):
    s = np.sort(samples)
    return SnrSampleStats(trials=s.size, mean=float(s.mean()), variance=float(s.var(ddof=1)), quantiles={},
                          ecdf=s, seed=seed)


class TestSimulate:
    def test_los_direct_only_is_deterministic(self):
        cfg = SMALL.replace(beta_br=0.0, kappa_d=math.inf, rho_d=0.4)
        st = simulate(cfg, 5000, 1)
        assert st.mean == pytest.approx(cfg.beta_d * cfg.M * cfg.tau_bar, rel=1e-12)
        assert st.variance < 1e-10 * st.mean**2

    def test_reproducible(self):
        assert simulate(SMALL, 20000, 7) == simulate(SMALL, 20000, 7)
        assert simulate(SMALL, 20000, 7) != simulate(SMALL, 20000, 8)

    def test_worker_independence(self):
        ref = simulate(SMALL, 30000, 3, workers=1)
        assert simulate(SMALL, 30000, 3, workers=4) == ref
        assert simulate(SMALL, 30000, 3, workers=8) == ref

    def test_merged_moments(self):
        x = simulate_samples(SMALL, 30000, 4)
        st = simulate(SMALL, 30000, 4)
        assert st.mean == pytest.approx(x.mean(), rel=1e-12)
        assert st.variance == pytest.approx(x.var(ddof=1), rel=1e-10)

    def test_prefix_stable(self):
        # block j always uses stream (seed, j), so longer runs extend shorter ones
        a = simulate_samples(SMALL, 10000, 5)
        b = simulate_samples(SMALL, 30000, 5)
        np.testing.assert_array_equal(a[:8192], b[:8192])

    def test_default_seed_from_config(self):
        assert simulate(SMALL.replace(seed=11), 1000).seed == 11

    def test_quantiles_monotone(self):
        q = simulate(SMALL, 20000, 2).quantiles
        vals = [q[p] for p in sorted(q)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_min_trials(self):
        with pytest.raises(ValueError):
            simulate(SMALL, 1, 0)

    def test_buffer_thinning(self, monkeypatch):
        monkeypatch.setattr(mc, "ECDF_MAX_SAMPLES", 1000)
        st = simulate(SMALL, 5000, 1)
        assert st.ecdf.size == 1000
        assert np.all(np.diff(st.ecdf) >= 0)

    def test_chi_squared_direct_link(self):
        cfg = ScenarioConfig(N_y=1, N_z=1, beta_br=0.0, kappa_d=0.0, rho_d=0.0)
        st = simulate(cfg, 10**6, 12)
        assert st.variance == pytest.approx(cfg.beta_d**2 * cfg.M * cfg.tau_bar**2, rel=3e-2)

    def test_estimator_consistency(self):
        ref = mean_snr(SMALL)
        err = {n: np.mean([abs(simulate(SMALL, n, s).mean - ref) for s in range(30)]) for n in (2000, 4000)}
        assert err[4000] < err[2000]


class TestEcdf:
    def test_bounds(self):
        st = simulate(SMALL, 10000, 9)
        assert empirical_cdf(st, st.ecdf[0] - 1.0) == 0.0
        assert empirical_cdf(st, st.ecdf[-1] + 1.0) == 1.0

    def test_median_probe(self):
        st = simulate(SMALL, 40000, 10)
        p = empirical_cdf(st, quantile(st, 0.5))
        assert abs(p - 0.5) <= 2 / math.sqrt(st.trials)

    def test_vectorised(self):
        st = _stats_from(np.array([1.0, 2.0, 3.0, 4.0]))
        np.testing.assert_allclose(empirical_cdf(st, np.array([0.5, 2.0, 3.5])), [0.0, 0.5, 0.75])


class TestKs:
    def test_synthetic_gamma(self):
        k, th = gamma_fit(200.0, 1600.0)
        x = sps.gamma.rvs(k, scale=th, size=10**5, random_state=np.random.default_rng(1))
        assert ks_distance(_stats_from(x), k, th) < 1.63 / math.sqrt(x.size)

    def test_matches_scipy(self):
        k, th = 3.0, 2.0
        x = sps.gamma.rvs(2.5, scale=2.2, size=2000, random_state=np.random.default_rng(2))
        ref = sps.kstest(x, "gamma", args=(k, 0, th)).statistic
        assert ks_distance(_stats_from(x), k, th) == pytest.approx(ref, rel=1e-9)

    def test_degenerate_samples(self):
        k, th = 4.0, 1.5
        x0 = 5.0
        F = float(snr_cdf(x0, k, th))
        d = ks_distance(_stats_from(np.full(500, x0)), k, th)
        assert d == pytest.approx(max(F, 1 - F), rel=1e-12)

    def test_statistic_helper(self):
        assert ks_statistic(np.array([1.0]), np.array([0.3])) == pytest.approx(0.7)
