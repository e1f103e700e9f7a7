"""
Shared pytest fixtures for uavcov tests.

Provides reusable fixtures including:
- Channel and network defaults (urban mmWave scenario)
- Quadrature settings loose enough for quick property checks
- Scenario files on disk
"""

from collections.abc import Generator
from pathlib import Path

import pytest

from state.config_manager import ScenarioConfig, default_scenario, save_config
from state.exclusion_cache import clear_exclusion_cache
from state.params import (
    ChannelParams,
    NetworkConfig,
    QuadratureSettings,
    SweepSpec,
    default_channel_params,
    default_network_config,
)

# ============================================================================
# Model Fixtures
# ============================================================================


@pytest.fixture
def channel_params() -> ChannelParams:
    """Urban channel constants."""
    return default_channel_params()


@pytest.fixture
def network_config() -> NetworkConfig:
    """20 dBm, 8x8, 5 UAVs/km^2 at 200 m, 0 dB threshold."""
    return default_network_config()


@pytest.fixture
def fast_settings() -> QuadratureSettings:
    """Looser tolerances for tests that only need a few digits."""
    return QuadratureSettings(abs_tol=1e-7, rel_tol=1e-7)


@pytest.fixture
def fresh_cache() -> Generator[None, None, None]:
    """Start and finish with an empty exclusion-table cache."""
    clear_exclusion_cache()
    yield
    clear_exclusion_cache()


# ============================================================================
# Scenario Fixtures
# ============================================================================


@pytest.fixture
def small_scenario(fast_settings: QuadratureSettings) -> ScenarioConfig:
    """Default scenario with a two-height grid and fast quadrature."""
    scenario = default_scenario()
    return scenario._replace(
        sweep=SweepSpec(
            heights=(100.0, 300.0),
            densities=(5.0,),
            thresholds_db=(0.0,),
            antenna_configs=((8, 8),),
        ),
        quadrature=fast_settings,
    )


@pytest.fixture
def scenario_file(tmp_path: Path, small_scenario: ScenarioConfig) -> Path:
    """The small scenario saved as YAML."""
    return save_config(small_scenario, tmp_path / "scenario.yaml")
