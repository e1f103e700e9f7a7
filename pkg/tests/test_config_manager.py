"""
Tests for the scenario config manager.

Tests cover:
- The shipped YAML file matching the built-in defaults
- Unit conversion at the config boundary and lossless round trips
- Rejection of unknown keys, unit-suffix mismatches and out-of-range values
- Sweep axis shorthands (ranges, scalars, "NxM" antennas)
"""

from pathlib import Path
from typing import Any

import pytest
from pytest_mock import MockerFixture

from core.config import DEFAULT_CONFIG_PATH
from core.exceptions import ConfigurationError, ValidationError
from state.config_manager import ConfigManager, ScenarioConfig, default_scenario, load_config, save_config


@pytest.fixture
def manager() -> ConfigManager:
    return ConfigManager()


@pytest.fixture
def document(manager: ConfigManager) -> dict[str, Any]:
    """Default scenario as a plain YAML-shaped dict."""
    return manager.to_dict(default_scenario())


class TestShippedConfig:
    """config/uavcov.yaml."""

    def test_matches_defaults(self) -> None:
        assert load_config(DEFAULT_CONFIG_PATH) == default_scenario()

    def test_channel_values(self) -> None:
        channel = load_config(DEFAULT_CONFIG_PATH).channel
        assert channel.cl == pytest.approx(10**-6.14, rel=1e-12)
        assert channel.cn == pytest.approx(10**-7.2, rel=1e-12)
        assert channel.nakagami_los.m == 3
        assert channel.nakagami_nlos.m == 2

    def test_network_values(self) -> None:
        network = load_config(DEFAULT_CONFIG_PATH).network
        assert network.ptx == pytest.approx(0.1, rel=1e-12)
        assert network.noise == pytest.approx(10 ** (-84 / 10) * 1e-3, rel=1e-12)
        assert network.lambda_uav == pytest.approx(5e-6, rel=1e-12)
        assert network.gain == 64.0

    def test_full_sweep_grid(self) -> None:
        sweep = load_config(DEFAULT_CONFIG_PATH).sweep
        assert sweep.heights[0] == 0.0 and sweep.heights[-1] == 1000.0
        assert len(sweep.heights) == 21
        assert len(sweep) == 21 * 5 * 3 * 5


class TestRoundTrip:
    """save_config / load_config."""

    def test_defaults_survive(self, tmp_path: Path) -> None:
        path = save_config(default_scenario(), tmp_path / "nested" / "scenario.yaml")
        assert path.exists()
        assert load_config(path) == default_scenario()

    def test_custom_scenario_survives(self, scenario_file: Path, small_scenario: ScenarioConfig) -> None:
        assert load_config(scenario_file) == small_scenario

    def test_dump_is_stable(self, manager: ConfigManager) -> None:
        text = manager.dumps(default_scenario())
        assert manager.dumps(manager.loads(text)) == text

    def test_version_written(self, manager: ConfigManager) -> None:
        assert manager.dumps(default_scenario()).startswith("uavcov:\n  version: '1.0'\n")


class TestRejection:
    """Malformed files fail with the offending key named."""

    def test_negative_density(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["network"]["lambda_per_km2"] = -1.0
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "network.lambda_per_km2"

    def test_unit_suffix_mismatch(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["network"]["ptx_w"] = document["network"].pop("ptx_dbm")
        with pytest.raises(ConfigurationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "network.ptx_w"
        assert "ptx_dbm" in excinfo.value.user_message

    def test_unknown_key(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["channel"]["shadowing"] = 8.0
        with pytest.raises(ConfigurationError, match="unknown key channel.shadowing"):
            manager.from_dict(document)

    def test_unknown_section(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["interference"] = {}
        with pytest.raises(ConfigurationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "interference"

    def test_missing_key(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        del document["network"]["n_uav"]
        with pytest.raises(ConfigurationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "network.n_uav"

    def test_missing_network(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        del document["network"]
        with pytest.raises(ConfigurationError):
            manager.from_dict(document)

    def test_invalid_yaml(self, manager: ConfigManager) -> None:
        with pytest.raises(ConfigurationError, match="not valid YAML"):
            manager.loads("network: [1, 2\n")

    def test_not_a_mapping(self, manager: ConfigManager) -> None:
        with pytest.raises(ConfigurationError):
            manager.loads("- 1\n- 2\n")

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.yaml")

    def test_unsupported_version(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["uavcov"]["version"] = "9.9"
        with pytest.raises(ConfigurationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "uavcov.version"

    def test_fractional_nakagami_shape(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["channel"]["m_los"] = 2.5
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "channel.m_los"

    def test_nlos_intercept_above_los(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["channel"]["cn_exp10"] = -5.0
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "channel.cn_exp10"

    def test_exponent_order(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["channel"]["an"] = 1.9
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "channel.an"

    def test_non_numeric_value(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["network"]["height_m"] = "high"
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "network.height_m"

    def test_negative_truncation_radius(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["quadrature"]["r_max_m"] = -10.0
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "quadrature.r_max_m"

    def test_truncation_radius_below_sweep_altitude(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["network"]["height_m"] = 100.0
        document["sweep"]["heights_m"] = [100.0, 300.0, 500.0]
        document["quadrature"]["r_max_m"] = 400.0
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "quadrature.r_max_m"
        assert excinfo.value.accepted == "> 500.0"

    def test_truncation_radius_below_network_altitude(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["network"]["height_m"] = 800.0
        document["sweep"]["heights_m"] = [100.0]
        document["quadrature"]["r_max_m"] = 600.0
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "quadrature.r_max_m"

    def test_bad_range(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["sweep"]["heights_m"] = {"start": 0, "stop": 100, "step": 0}
        with pytest.raises(ValidationError):
            manager.from_dict(document)

    def test_bad_antenna(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["sweep"]["antennas"] = ["8by8"]
        with pytest.raises(ValidationError) as excinfo:
            manager.from_dict(document)
        assert excinfo.value.key == "sweep.antennas"


class TestShorthands:
    """Optional keys and compact sweep notations."""

    def test_aoi_radius_defaults(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        del document["network"]["aoi_radius_m"]
        assert manager.from_dict(document).network.aoi_radius == 2000.0

    def test_channel_section_optional(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        del document["channel"]
        assert manager.from_dict(document).channel == default_scenario().channel

    def test_sweep_collapses_to_network_point(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        del document["sweep"]
        sweep = manager.from_dict(document).sweep
        assert sweep.heights == (200.0,)
        assert sweep.densities == (5.0,)
        assert sweep.thresholds_db == (0.0,)
        assert sweep.antenna_configs == ((8, 8),)

    def test_range_mapping_inclusive(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["sweep"]["heights_m"] = {"start": 0, "stop": 100, "step": 25}
        assert manager.from_dict(document).sweep.heights == (0.0, 25.0, 50.0, 75.0, 100.0)

    def test_scalar_axis(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["sweep"]["gammas_db"] = 5
        assert manager.from_dict(document).sweep.thresholds_db == (5.0,)

    def test_antenna_strings(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["sweep"]["antennas"] = ["64x4", "256X8"]
        assert manager.from_dict(document).sweep.antenna_configs == ((64, 4), (256, 8))

    def test_exponent_string_tolerance(self, manager: ConfigManager) -> None:
        """PyYAML reads 1e-6 (no dot) as a string."""
        text = "network:\n" + "".join(
            f"  {k}: {v}\n"
            for k, v in (
                ("ptx_dbm", 20),
                ("n_uav", 8),
                ("n_ue", 8),
                ("nf_db", 5),
                ("noise_dbm", -84),
                ("lambda_per_km2", 5),
                ("height_m", 200),
                ("gamma_db", 0),
            )
        ) + "quadrature:\n  abs_tol: 1e-6\n"
        assert manager.loads(text).quadrature.abs_tol == 1e-6

    def test_explicit_truncation_radius(self, manager: ConfigManager, document: dict[str, Any]) -> None:
        document["quadrature"]["r_max_m"] = 25000
        assert manager.from_dict(document).quadrature.r_max == 25000.0

    def test_flagged_bound_from_environment(
        self, manager: ConfigManager, document: dict[str, Any], mocker: MockerFixture
    ) -> None:
        mocker.patch("core.config.DEFAULT_MAX_FLAGGED_FRACTION", 0.2)
        del document["validation"]
        assert manager.from_dict(document).validation.max_flagged_fraction == 0.2
        assert default_scenario().validation.max_flagged_fraction == 0.2

    def test_flagged_bound_in_file_wins(
        self, manager: ConfigManager, document: dict[str, Any], mocker: MockerFixture
    ) -> None:
        mocker.patch("core.config.DEFAULT_MAX_FLAGGED_FRACTION", 0.2)
        document["validation"]["max_flagged_fraction"] = 0.01
        assert manager.from_dict(document).validation.max_flagged_fraction == 0.01
