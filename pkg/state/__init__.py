# Scenario parameters and the YAML scenario file
from .config_manager import ConfigManager, ScenarioConfig, default_scenario, load_config, save_config
from .params import (
    ChannelParams,
    LinkState,
    NetworkConfig,
    QuadratureSettings,
    ResultRow,
    SweepPoint,
    SweepSpec,
    ValidationSettings,
    default_channel_params,
    default_network_config,
    default_sweep_spec,
)

__all__ = [
    "ChannelParams",
    "ConfigManager",
    "LinkState",
    "NetworkConfig",
    "QuadratureSettings",
    "ResultRow",
    "ScenarioConfig",
    "SweepPoint",
    "SweepSpec",
    "ValidationSettings",
    "default_channel_params",
    "default_network_config",
    "default_scenario",
    "default_sweep_spec",
    "load_config",
    "save_config",
]
