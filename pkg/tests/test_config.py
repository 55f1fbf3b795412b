import math

import pytest
from hypothesis import given, settings, strategies as st

from ris_snr.config import ConfigError, ScenarioConfig, dump_config, load_config, parse_config


class TestDefaults:
    def test_baseline_sizes(self):
        cfg = ScenarioConfig()
        assert (cfg.M, cfg.N) == (32, 64)
        assert cfg.beta_br == pytest.approx(20.0**-2)
        assert cfg.beta_d == cfg.beta_ru == 0.69
        assert cfg.rho_d == cfg.rho_ru == 0.7
        assert cfg.kappa_d == cfg.kappa_ru == 1.0
        assert (cfg.d_b, cfg.d_r) == (0.5, 0.2)
        assert cfg.tau_bar == 1.0

    def test_baseline_angles(self):
        cfg = ScenarioConfig()
        assert (cfg.theta_D, cfg.omega_D, cfg.theta_A, cfg.omega_A) == (77.1, 19.95, 109.9, -29.9)
        assert (cfg.theta_Dr, cfg.omega_Dr, cfg.theta_Ad, cfg.omega_Ad) == (80.94, -64.35, 71.95, 25.1)

    def test_replace(self):
        cfg = ScenarioConfig().replace(N_y=2, N_z=3)
        assert cfg.N == 6


class TestValidation:
    @pytest.mark.parametrize("kw", [
        {"rho_d": 1.5}, {"rho_ru": -0.1}, {"kappa_d": -1.0}, {"beta_d": -0.1},
        {"tau_bar": 0.0}, {"M_y": 0}, {"N_z": 0}, {"d_b": 0.0}, {"theta_A": 200.0},
        {"omega_D": 95.0}, {"beta_br": math.nan},
    ])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            ScenarioConfig(**kw)

    def test_line_of_sight_limit_allowed(self):
        assert ScenarioConfig(kappa_d=math.inf).kappa_d == math.inf

    def test_zero_cascade_allowed(self):
        assert ScenarioConfig(beta_br=0.0).beta_br == 0.0


class TestParse:
    def test_comments_and_blank_lines(self):
        cfg = parse_config("# header\n\nM_y = 2  # two columns\nrho_d=0.1\n")
        assert cfg.M_y == 2 and cfg.rho_d == 0.1

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config("M_y = 2\nfoo = 3\n")
        assert err.value.line == 2 and err.value.field == "foo"

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config("M_y = 2\nM_y = 3\n")
        assert err.value.line == 2

    def test_bad_number(self):
        with pytest.raises(ConfigError) as err:
            parse_config("rho_d = abc\n")
        assert err.value.field == "rho_d" and err.value.line == 1

    def test_integer_field_rejects_float(self):
        with pytest.raises(ConfigError):
            parse_config("N_y = 2.5\n")

    def test_range_error_reports_line(self):
        with pytest.raises(ConfigError) as err:
            parse_config("\n\nrho_ru = 3\n")
        assert err.value.line == 3 and err.value.field == "rho_ru"

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config("M_y 2\n")

    def test_load(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("kappa_ru = 4\n")
        assert load_config(p).kappa_ru == 4.0


class TestRoundTrip:
    def test_defaults(self):
        assert parse_config(dump_config()) == ScenarioConfig()

    @settings(max_examples=50, deadline=None)
    @given(rho=st.floats(0, 1), kappa=st.floats(0, 1e6), beta=st.floats(1e-9, 10),
           angle=st.floats(0, 180), seed=st.integers(0, 2**31))
    def test_random(self, rho, kappa, beta, angle, seed):
        cfg = ScenarioConfig(rho_d=rho, kappa_ru=kappa, beta_br=beta, theta_Dr=angle, seed=seed)
        assert parse_config(dump_config(cfg)) == cfg

    def test_infinite_kappa(self):
        cfg = ScenarioConfig(kappa_d=math.inf)
        assert parse_config(dump_config(cfg)) == cfg
