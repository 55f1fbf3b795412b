import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ris_snr.analytic.fr import (
    FrMethod,
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
from ris_snr.analytic.ricean import ricean_link, ricean_moment
from ris_snr.channel_model import ArrayGeometry, AngleSet, exp_correlation, psd_sqrt, vura_steering
from ris_snr.specfun import AccuracyError, AccuracySpec, hyp2f1_reg_product


def _ris(rows, cols, rho, spacing=0.2, angles=(80.94, -64.35)):
    g = ArrayGeometry(rows, cols, spacing)
    return exp_correlation(rho, g).R, vura_steering(g, AngleSet(*angles))


def _pair_mc(rho, dtheta, kappa, n=10**6, seed=0):
    eta, zeta = ricean_link(kappa)
    rng = np.random.default_rng(seed)
    u = (rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))) / math.sqrt(2)
    g_i = u[:, 0]
    g_k = rho * u[:, 0] + math.sqrt(1 - rho * rho) * u[:, 1]
    r_i = np.abs(eta * np.exp(1j * dtheta) + zeta * g_i)
    r_k = np.abs(eta + zeta * g_k)
    return float(np.mean(r_i * r_k))


def _fr_mc(R, a, kappa, n=10**6, seed=0):
    eta, zeta = ricean_link(kappa)
    rng = np.random.default_rng(seed)
    S = psd_sqrt(R)
    u = (rng.standard_normal((n, a.size)) + 1j * rng.standard_normal((n, a.size))) / math.sqrt(2)
    r = np.abs(eta * a + zeta * (u @ S.T))
    s = r.sum(axis=1)
    return float(np.mean(s * s - np.sum(r * r, axis=1)))


class TestPairMoment:
    @pytest.mark.parametrize("rho,dth,kappa", [(0.3, 0.4, 1.0), (0.7, 2.0, 1.0), (0.5, 1.0, 4.0)])
    def test_series_monte_carlo(self, rho, dth, kappa):
        assert pair_moment_series(rho, dth, kappa)[0] == pytest.approx(_pair_mc(rho, dth, kappa), rel=5e-3)

    @pytest.mark.parametrize("rho,dth,kappa", [(0.7, 2.0, 1.0), (0.95, 0.3, 6.0), (0.9, 3.0, 20.0)])
    def test_integral_monte_carlo(self, rho, dth, kappa):
        assert pair_moment_integral(rho, dth, kappa)[0] == pytest.approx(_pair_mc(rho, dth, kappa), rel=5e-3)

    @settings(max_examples=15, deadline=None)
    @given(rho=st.floats(0.05, 0.8), dth=st.floats(0, math.pi), kappa=st.floats(0.05, 4))
    def test_series_vs_integral(self, rho, dth, kappa):
        s, _ = pair_moment_series(rho, dth, kappa)
        q, _ = pair_moment_integral(rho, dth, kappa)
        assert s == pytest.approx(q, rel=1e-6)

    def test_rayleigh_reduction(self):
        for rho in (0.2, 0.6, 0.9):
            ref = math.pi / 4 * hyp2f1_reg_product(rho * rho)
            assert pair_moment_integral(rho, 0.0, 0.0)[0] == pytest.approx(ref, rel=1e-6)
            assert pair_moment_series(rho, 1.3, 0.0)[0] == pytest.approx(ref, rel=1e-12)

    def test_independent_pair(self):
        m1 = ricean_moment(1, 2.0)
        assert pair_moment_series(0.0, 1.0, 2.0)[0] == pytest.approx(m1 * m1)
        assert pair_moment_integral(0.0, 1.0, 2.0)[0] == pytest.approx(m1 * m1, rel=1e-8)

    def test_even_in_phase(self):
        assert pair_moment_series(0.6, 0.7, 1.5)[0] == pytest.approx(pair_moment_series(0.6, -0.7, 1.5)[0],
                                                                       rel=1e-13)

    def test_extended_precision_agrees(self):
        d = pair_moment_series(0.7, 1.1, 1.0, precision="double")[0]
        m = pair_moment_series(0.7, 1.1, 1.0, precision="mp")[0]
        assert d == pytest.approx(m, rel=1e-9)

    def test_perfect_correlation_rayleigh(self):
        assert pair_moment_integral(1.0, 0.0, 0.0)[0] == pytest.approx(1.0, rel=1e-8)

    def test_series_domain(self):
        with pytest.raises(ValueError):
            pair_moment_series(1.0, 0.0, 1.0)


class TestClosedForms:
    def test_uncorrelated_values(self):
        assert fr_uncorrelated(1, 1.0).value == 0.0
        assert fr_uncorrelated(2, 0.0).value == pytest.approx(math.pi / 2)
        assert fr_uncorrelated(2, 1e3).value == pytest.approx(2.0, rel=1e-2)

    def test_rayleigh_identity(self):
        assert fr_rayleigh(np.eye(5)).value == pytest.approx(math.pi * 20 / 4, rel=1e-14)

    def test_rayleigh_all_ones(self):
        assert fr_rayleigh(np.ones((4, 4))).value == pytest.approx(12.0)

    def test_rayleigh_pair_monte_carlo(self):
        ref = _pair_mc(0.7, 0.0, 0.0)
        assert fr_rayleigh(np.array([[1, 0.7], [0.7, 1]])).value / 2 == pytest.approx(ref, rel=1e-2)


class TestFr:
    def test_single_element(self):
        R, a = _ris(1, 1, 0.5)
        assert fr_series(R, a, 1.0).value == 0.0

    def test_series_monte_carlo(self):
        R, a = _ris(2, 2, 0.7)
        assert fr_series(R, a, 1.0).value == pytest.approx(_fr_mc(R, a, 1.0), rel=1e-2)

    def test_series_integral_agree(self):
        R, a = _ris(2, 2, 0.5)
        s = fr_series(R, a, 1.0).value
        q = fr_integral(R, a, 1.0).value
        assert abs(s - q) / q < 1e-4

    def test_series_rayleigh_agree(self):
        R, a = _ris(2, 3, 0.6)
        assert fr_series(R, a, 0.0).value == pytest.approx(fr_rayleigh(R).value, rel=1e-8)

    def test_integral_rayleigh_agree(self):
        R, a = _ris(2, 2, 0.6)
        assert fr_integral(R, a, 0.0).value == pytest.approx(fr_rayleigh(R).value, rel=1e-6)

    def test_high_correlation(self):
        R, a = _ris(2, 2, 0.95)
        v = fr_integral(R, a, 6.0).value
        assert v <= 12.0
        assert v == pytest.approx(_fr_mc(R, a, 6.0, n=2 * 10**6), rel=1e-3)

    def test_high_correlation_aligned_los_exceeds_rayleigh(self):
        # with co-phased LOS components a strong K-factor raises every pair moment;
        # with spread LOS phases it need not (the steered case above sits just below)
        R, a = _ris(2, 2, 0.95, angles=(90.0, 0.0))
        assert fr_rayleigh(R).value < fr_integral(R, a, 6.0).value <= 12.0

    def test_perfect_corr_continuity(self):
        R, a = _ris(2, 2, 1 - 1e-4)
        assert fr_integral(R, a, 1.0).value == pytest.approx(fr_perfect_corr(a, 1.0).value, rel=1e-3)

    def test_perfect_corr_saturation(self):
        _, a = _ris(2, 2, 0.0)
        assert fr_perfect_corr(a, 1e3).value == pytest.approx(12.0, rel=1e-3)

    def test_perfect_corr_rayleigh(self):
        _, a = _ris(2, 2, 0.0)
        assert fr_perfect_corr(a, 0.0).value == pytest.approx(12.0, rel=1e-8)

    @settings(max_examples=15, deadline=None)
    @given(rho=st.floats(0, 0.95), kappa=st.floats(0, 50))
    def test_holder_bound(self, rho, kappa):
        R, a = _ris(2, 2, rho)
        v = compute_fr(R, a, kappa).value
        assert 0 <= v <= 12 * (1 + 1e-9)

    def test_increases_with_kappa(self):
        R, a = _ris(2, 2, 0.7)
        vals = [compute_fr(R, a, k).value for k in (0.0, 0.5, 1.0, 3.0, 10.0)]
        assert all(x < y for x, y in zip(vals, vals[1:]))

    def test_size_mismatch(self):
        R, _ = _ris(2, 2, 0.5)
        _, a = _ris(1, 3, 0.5)
        with pytest.raises(ValueError):
            fr_series(R, a, 1.0)


class TestDispatch:
    def test_selection(self):
        assert select_fr_method(np.eye(3), 1.0) is FrMethod.UNCORRELATED
        assert select_fr_method(_ris(2, 2, 0.5)[0], 0.0) is FrMethod.RAYLEIGH
        assert select_fr_method(np.ones((3, 3)), 1.0) is FrMethod.PERFECT_CORR
        assert select_fr_method(_ris(2, 2, 0.5)[0], 2.0) is FrMethod.SERIES
        assert select_fr_method(_ris(2, 2, 0.9)[0], 2.0) is FrMethod.INTEGRAL
        assert select_fr_method(_ris(2, 2, 0.5)[0], 9.0) is FrMethod.INTEGRAL

    def test_auto_falls_back(self, monkeypatch):
        import ris_snr.analytic.fr as fr_mod

        def failing(*args, **kwargs):
            raise AccuracyError("forced")

        monkeypatch.setattr(fr_mod, "fr_series", failing)
        R, a = _ris(2, 2, 0.5)
        assert fr_mod.compute_fr(R, a, 1.0).method is FrMethod.INTEGRAL

    def test_explicit_method(self):
        R, a = _ris(2, 2, 0.5)
        assert compute_fr(R, a, 1.0, method="integral").method is FrMethod.INTEGRAL

    def test_accuracy_spec_passed(self):
        R, a = _ris(2, 2, 0.5)
        v = fr_series(R, a, 1.0, AccuracySpec(rel_tol=1e-6)).value
        assert v == pytest.approx(fr_series(R, a, 1.0).value, rel=1e-5)
