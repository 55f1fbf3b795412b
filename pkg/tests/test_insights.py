import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ris_snr.analytic import mean_snr
from ris_snr.channel_model import scenario_geometry
from ris_snr.config import ScenarioConfig
from ris_snr.insights import (
    GAIN_LIMIT,
    classify_q,
    gain_coefficients,
    gain_curve,
    gain_fav_unfav,
    mean_snr_favourable,
    mean_snr_unfavourable,
    optimal_gain_n,
    q_func,
)

BASE = ScenarioConfig()


class TestQ:
    @settings(max_examples=30, deadline=None)
    @given(alpha=st.floats(0, 100))
    def test_origin(self, alpha):
        assert q_func(alpha, 0.0) == pytest.approx(1.0, rel=1e-14)

    def test_alpha_one_nondecreasing(self):
        q = q_func(1.0, np.linspace(0, 50, 501))
        assert np.all(np.diff(q) >= -1e-14)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_asymptote(self, alpha):
        assert q_func(alpha, 1e6) == pytest.approx(2 * math.sqrt(alpha / math.pi), rel=1e-3)

    def test_classify_examples(self):
        b = classify_q(2.0)
        assert (b.increases_at_origin, b.positive_gradient_at_infinity, b.limit_ge_one) == (True, True, True)
        b = classify_q(0.6)
        assert (b.increases_at_origin, b.positive_gradient_at_infinity, b.limit_ge_one) == (False, True, False)
        b = classify_q(0.3)
        assert (b.increases_at_origin, b.positive_gradient_at_infinity, b.limit_ge_one) == (False, False, False)
        assert b.asymptote == pytest.approx(2 * math.sqrt(0.3 / math.pi))

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75, 1.5])
    def test_origin_flag_matches_numeric(self, alpha):
        assert (q_func(alpha, 1e-4) > 1.0) == classify_q(alpha).increases_at_origin

    @pytest.mark.parametrize("alpha", [0.3, 0.9, 2.0])
    def test_limit_flag_matches_numeric(self, alpha):
        assert (q_func(alpha, 1e8) >= 1.0) == classify_q(alpha).limit_ge_one

    def test_negative_inputs(self):
        with pytest.raises(ValueError):
            q_func(-1.0, 1.0)
        with pytest.raises(ValueError):
            classify_q(-0.1)


class TestScenarios:
    def test_favourable_no_cascade(self):
        cfg = BASE.replace(beta_br=0.0)
        assert mean_snr_favourable(cfg) == cfg.beta_d * cfg.M * cfg.tau_bar

    def test_favourable_hand_expansion(self):
        M, N = 32, 64
        bd, bbr, bru = 0.69, 0.0025, 0.69
        ref = bd * M + N * math.sqrt(M * math.pi) * math.sqrt(bd * bbr * bru) + bbr * bru * M * N * N
        assert mean_snr_favourable(BASE) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("rho_ru,kappa_ru", [(0.0, 1e12), (0.7, math.inf)])
    def test_favourable_matches_general(self, rho_ru, kappa_ru):
        cfg = BASE.replace(kappa_d=0.0, rho_d=0.0, rho_ru=rho_ru, kappa_ru=kappa_ru)
        assert mean_snr_favourable(cfg) == pytest.approx(mean_snr(cfg), rel=1e-3)

    def test_unfavourable_matches_general(self):
        cfg = BASE.replace(kappa_d=1e12, rho_ru=0.0, kappa_ru=0.0)
        assert mean_snr_unfavourable(cfg) == pytest.approx(mean_snr(cfg), rel=1e-3)

    def test_unfavourable_aligned(self):
        cfg = BASE.replace(theta_Ad=BASE.theta_A, omega_Ad=BASE.omega_A)
        geo = scenario_geometry(cfg)
        assert abs(np.vdot(geo.a_b, geo.a_d)) == pytest.approx(cfg.M)
        M, N = cfg.M, cfg.N
        root = math.sqrt(cfg.beta_d * cfg.beta_br * cfg.beta_ru)
        ref = cfg.beta_d * M + N * math.sqrt(math.pi) * M * root + cfg.beta_br * cfg.beta_ru * M * (
            N + math.pi * N * (N - 1) / 4)
        assert mean_snr_unfavourable(cfg) == pytest.approx(ref, rel=1e-12)

    def test_unfavourable_single_element(self):
        geo = scenario_geometry(BASE)
        ab = abs(np.vdot(geo.a_b, geo.a_d))
        root = math.sqrt(BASE.beta_d * BASE.beta_br * BASE.beta_ru)
        ref = BASE.beta_d * BASE.M + math.sqrt(math.pi) * ab * root + BASE.beta_br * BASE.beta_ru * BASE.M
        assert mean_snr_unfavourable(BASE, 1) == pytest.approx(ref, rel=1e-14)

    def test_favourable_dominates(self):
        assert all(mean_snr_favourable(BASE, n) >= mean_snr_unfavourable(BASE, n) for n in range(1, 2049))


class TestGain:
    def test_asymptote(self):
        assert abs(gain_fav_unfav(BASE, 10**5) - 0.27324) < 0.02
        assert GAIN_LIMIT == pytest.approx(0.27324, abs=1e-5)

    def test_zero_gain(self):
        assert gain_fav_unfav(BASE.replace(beta_br=0.0), 50) == 0.0

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            gain_fav_unfav(BASE, 0)

    def test_coefficient_regression(self):
        # fit numerator and denominator polynomials independently of the D's
        ns = np.arange(1, 65, dtype=float)
        fav = np.array([mean_snr_favourable(BASE, int(n)) for n in ns]) / BASE.tau_bar
        unfav = np.array([mean_snr_unfavourable(BASE, int(n)) for n in ns]) / BASE.tau_bar
        num = np.polyfit(ns, fav - unfav, 2)
        den = np.polyfit(ns, unfav, 2)
        c = gain_coefficients(BASE)
        np.testing.assert_allclose(num, [c.D1, c.D2, 0.0], rtol=1e-9, atol=1e-9 * abs(c.D2))
        np.testing.assert_allclose(den, [c.D3, c.D4, c.D5], rtol=1e-9)
        assert np.max(np.abs(c.gain(ns) - (fav - unfav) / unfav)) < 1e-12

    @pytest.mark.parametrize("betas", [(0.69, 0.0025, 0.69), (0.1, 0.01, 0.5), (1e-12, 0.0025, 0.69),
                                       (2.0, 1e-4, 0.3)])
    def test_optimal_n_exhaustive(self, betas):
        cfg = BASE.replace(beta_d=betas[0], beta_br=betas[1], beta_ru=betas[2])
        gains = [gain_fav_unfav(cfg, n) for n in range(1, 4097)]
        n_opt = optimal_gain_n(cfg, 4096)
        assert gain_fav_unfav(cfg, n_opt) >= max(gains)
        assert n_opt == int(np.argmax(gains)) + 1

    def test_monotone_tail(self):
        curve = gain_curve(BASE, range(1, 20001, 7))
        i = curve.n_values.index(curve.argmax_n)
        tail = np.array(curve.gains[i:])
        assert np.all(np.diff(tail) < 0)
        assert np.all(tail > GAIN_LIMIT)
        assert curve.limit == GAIN_LIMIT

    def test_curve_finite(self):
        curve = gain_curve(BASE, [1, 10, 100, 1000])
        assert all(math.isfinite(g) and g > -1 for g in curve.gains)

    def test_small_n_max(self):
        with pytest.raises(ValueError):
            optimal_gain_n(BASE, 1)
