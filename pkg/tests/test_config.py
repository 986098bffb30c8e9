import json

import numpy as np
import pytest

from curvepulse.config import (ConfigError, ScenarioConfig, config_hash,
                               dumps_canonical, load_config, resolve_config)


class TestResolve:
    def test_defaults(self):
        cfg = resolve_config({})
        assert cfg.scheme == "STA_SCQC"
        assert cfg.omega_max_mhz == 1.9
        assert cfg.curve_a_over_pi == 0.15
        assert cfg.curve_b == 0.06
        assert cfg.stirap_durations_us == [0.8, 5.0, 6.0]

    def test_unknown_top_level_field(self):
        with pytest.raises(ConfigError) as err:
            resolve_config({"bogus": 1})
        assert "$.bogus" in str(err.value)

    def test_unknown_nested_field(self):
        with pytest.raises(ConfigError) as err:
            resolve_config({"noise": {"delta_khz": {"start": 0, "stop": 1,
                                                    "points": 3, "shape": "x"}}})
        assert "$.noise.delta_khz.shape" in str(err.value)

    def test_bad_scheme(self):
        with pytest.raises(ConfigError) as err:
            resolve_config({"scheme": "RAP"})
        assert "$.scheme" in str(err.value)

    def test_bad_type_reports_path(self):
        with pytest.raises(ConfigError) as err:
            resolve_config({"curve": {"a_over_pi": "wide"}})
        assert "$.curve.a_over_pi" in str(err.value)

    def test_curve_b_range(self):
        with pytest.raises(ConfigError) as err:
            resolve_config({"curve": {"b": 0.7}})
        assert "$.curve.b" in str(err.value)


class TestUnits:
    def test_ordinary_frequency_gets_two_pi(self):
        cfg = resolve_config({"omega_max_mhz": 1.9})
        assert cfg.omega_max_rad_s == pytest.approx(2 * np.pi * 1.9e6)

    def test_angular_flag_skips_two_pi(self):
        cfg = resolve_config({"omega_max_mhz": 11.938, "angular": True})
        assert cfg.omega_max_rad_s == pytest.approx(11.938e6)

    def test_delta_grid_units(self):
        cfg = resolve_config({"noise": {"delta_khz": {"start": -300,
                                                      "stop": 300,
                                                      "points": 3}}})
        grid = cfg.delta_grid_rad_s()
        assert grid[0] == pytest.approx(-2 * np.pi * 300e3)
        assert grid[-1] == pytest.approx(2 * np.pi * 300e3)

    def test_srt_detuning(self):
        cfg = resolve_config({})
        assert cfg.srt_detuning_rad_s == pytest.approx(2 * np.pi * 2.5e6)


class TestCanonical:
    def test_round_trip_bytes(self, tmp_path):
        cfg = resolve_config({"scheme": "SRT", "omega_max_mhz": 2.0,
                              "noise": {"epsilon": {"start": -0.1, "stop": 0.1,
                                                    "points": 5}}})
        text = dumps_canonical(cfg)
        path = tmp_path / "echo.json"
        path.write_text(text)
        cfg2 = load_config(path)
        assert dumps_canonical(cfg2) == text
        assert config_hash(cfg2) == config_hash(cfg)

    def test_hash_differs_for_different_config(self):
        a = resolve_config({})
        b = resolve_config({"omega_max_mhz": 2.0})
        assert config_hash(a) != config_hash(b)

    def test_canonical_is_valid_input(self):
        cfg = ScenarioConfig()
        data = json.loads(dumps_canonical(cfg))
        assert dumps_canonical(resolve_config(data)) == dumps_canonical(cfg)

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)
