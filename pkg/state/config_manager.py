"""
Scenario Config Manager

Loads and saves the YAML scenario file. Every dimensioned key carries its unit
suffix and is converted once, here, into the linear SI values the engines use:

    network:
      ptx_dbm: 20.0          -> NetworkConfig.ptx = 0.1 W
      lambda_per_km2: 5.0    -> NetworkConfig.lambda_uav = 5e-6 per m^2
    channel:
      cl_exp10: -6.14        -> ChannelParams.cl = 10^-6.14

Emitted values are rounded just enough to strip conversion noise, so loading a
saved file reproduces the in-memory parameters exactly.
"""

import logging
import math
from pathlib import Path
from typing import Any, ClassVar, NamedTuple

import yaml

from core import config as app_config
from core.exceptions import ConfigurationError, ValidationError
from services.special_functions import NakagamiParams, linear_to_db, watt_to_dbm
from state.params import (
    ChannelParams,
    NetworkConfig,
    QuadratureSettings,
    SweepSpec,
    ValidationSettings,
    default_channel_params,
    default_network_config,
    default_sweep_spec,
)

logger = logging.getLogger(__name__)

# Decimal places kept when emitting converted quantities
_EXP10_DIGITS = 12
_DB_DIGITS = 10
_DENSITY_DIGITS = 9

_UNIT_SUFFIXES = ("_per_km2", "_per_m2", "_exp10", "_dbm", "_db", "_km", "_m", "_w")


class ScenarioConfig(NamedTuple):
    """Everything a run needs, fully validated and in linear units."""

    channel: ChannelParams
    network: NetworkConfig
    sweep: SweepSpec
    quadrature: QuadratureSettings
    validation: ValidationSettings


def default_scenario() -> ScenarioConfig:
    """Shipped channel and network defaults with the full sweep grid."""
    return ScenarioConfig(
        channel=default_channel_params(),
        network=default_network_config(),
        sweep=default_sweep_spec(),
        quadrature=QuadratureSettings(),
        validation=ValidationSettings(max_flagged_fraction=app_config.DEFAULT_MAX_FLAGGED_FRACTION),
    )


def _stem(key: str) -> str:
    for suffix in _UNIT_SUFFIXES:
        if key.endswith(suffix):
            return key[: -len(suffix)]
    return key


def _reject_unknown(prefix: str, keys: Any, known: tuple[str, ...]) -> None:
    for key in keys:
        if key in known:
            continue
        path = f"{prefix}.{key}" if prefix else str(key)
        matches = [k for k in known if _stem(k) == _stem(str(key))]
        if matches:
            raise ConfigurationError(f"unit-suffix mismatch for {path}: expected '{matches[0]}'", key=path)
        raise ConfigurationError(f"unknown key {path} (accepted: {', '.join(known)})", key=path)


class _Section:
    """Typed accessors over one mapping of the YAML document."""

    def __init__(self, name: str, data: Any, known: tuple[str, ...]):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"section '{name}' must be a mapping", key=name)
        _reject_unknown(name, data, known)
        self.name = name
        self.data = data

    def _path(self, key: str) -> str:
        return f"{self.name}.{key}"

    def has(self, key: str) -> bool:
        return key in self.data

    def raw(self, key: str, default: Any = ...) -> Any:
        if key not in self.data:
            if default is ...:
                raise ConfigurationError(f"missing key {self._path(key)}", key=self._path(key))
            return default
        return self.data[key]

    def number(self, key: str, default: Any = ...) -> float:
        return _to_float(self.raw(key, default), self._path(key))

    def integer(self, key: str, default: Any = ...) -> int:
        raw = self.raw(key, default)
        if isinstance(raw, bool) or not isinstance(raw, int):
            if isinstance(raw, float) and raw.is_integer():
                return int(raw)
            raise ValidationError(
                f"{self._path(key)} must be an integer, got {raw!r}", key=self._path(key), accepted="integer"
            )
        return raw


def _to_float(raw: Any, path: str) -> float:
    # PyYAML reads exponent literals without a dot ("1e-8") as strings
    if isinstance(raw, str):
        try:
            raw = float(raw)
        except ValueError:
            raise ValidationError(f"{path} must be a number, got {raw!r}", key=path, accepted="number") from None
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValidationError(f"{path} must be a number, got {raw!r}", key=path, accepted="number")
    value = float(raw)
    if not math.isfinite(value):
        raise ValidationError(f"{path} must be finite, got {value}", key=path, accepted="finite")
    return value


def _number_list(section: _Section, key: str) -> tuple[float, ...]:
    raw = section.raw(key)
    path = section._path(key)
    if isinstance(raw, dict):
        return _expand_range(raw, path)
    if not isinstance(raw, list):
        raw = [raw]
    return tuple(_to_float(v, path) for v in raw)


def _expand_range(spec: dict[str, Any], path: str) -> tuple[float, ...]:
    """{start, stop, step} with an inclusive stop."""
    unknown = set(spec) - {"start", "stop", "step"}
    if unknown or not {"start", "stop", "step"} <= set(spec):
        raise ConfigurationError(f"{path} range needs exactly start, stop and step", key=path)
    start = _to_float(spec["start"], f"{path}.start")
    stop = _to_float(spec["stop"], f"{path}.stop")
    step = _to_float(spec["step"], f"{path}.step")
    if step <= 0 or stop < start:
        raise ValidationError(f"{path} range must satisfy step > 0 and stop >= start", key=path, accepted="step > 0")
    count = int(math.floor((stop - start) / step + 1e-9))
    return tuple(start + i * step for i in range(count + 1))


def _antenna_list(section: _Section, key: str) -> tuple[tuple[int, int], ...]:
    path = section._path(key)
    pairs: list[tuple[int, int]] = []
    raw = section.raw(key)
    for item in raw if isinstance(raw, list) else [raw]:
        if isinstance(item, str):
            parts: Any = item.lower().split("x")
        else:
            parts = item
        try:
            n_uav, n_ue = (int(p) for p in parts)
        except (TypeError, ValueError):
            raise ValidationError(
                f"{path} entries must be [n_uav, n_ue] pairs, got {item!r}", key=path, accepted="[n_uav, n_ue]"
            ) from None
        pairs.append((n_uav, n_ue))
    return tuple(pairs)


# ============================================================================
# Loading
# ============================================================================


class ConfigManager:
    """Reads and writes scenario files."""

    FORMAT_VERSION: ClassVar[str] = "1.0"
    SUPPORTED_VERSIONS: ClassVar[tuple[str, ...]] = ("1.0",)

    CHANNEL_KEYS: ClassVar[tuple[str, ...]] = (
        "los_c", "los_y", "cl_exp10", "cn_exp10", "al", "an", "m_los", "m_nlos", "omega_los", "omega_nlos",
    )
    NETWORK_KEYS: ClassVar[tuple[str, ...]] = (
        "ptx_dbm", "n_uav", "n_ue", "nf_db", "noise_dbm", "lambda_per_km2", "height_m", "gamma_db", "aoi_radius_m",
    )
    SWEEP_KEYS: ClassVar[tuple[str, ...]] = ("heights_m", "lambdas_per_km2", "gammas_db", "antennas")
    QUADRATURE_KEYS: ClassVar[tuple[str, ...]] = (
        "abs_tol", "rel_tol", "max_depth", "max_subintervals", "tail_tol", "r_max_m",
    )
    VALIDATION_KEYS: ClassVar[tuple[str, ...]] = ("confidence", "max_flagged_fraction")
    TOP_LEVEL_KEYS: ClassVar[tuple[str, ...]] = ("uavcov", "channel", "network", "sweep", "quadrature", "validation")

    def load(self, path: str | Path) -> ScenarioConfig:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"cannot read config file {path}: {e.strerror or e}") from e
        config = self.loads(text)
        logger.info("Loaded scenario config from %s (%d sweep points)", path, len(config.sweep))
        return config

    def loads(self, text: str) -> ScenarioConfig:
        try:
            document = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"config is not valid YAML: {e}") from e
        if not isinstance(document, dict):
            raise ConfigurationError("config must be a YAML mapping of sections")
        return self.from_dict(document)

    def from_dict(self, document: dict[str, Any]) -> ScenarioConfig:
        _reject_unknown("", document, self.TOP_LEVEL_KEYS)
        self._check_version(document.get("uavcov"))

        channel = self._channel(_Section("channel", document.get("channel"), self.CHANNEL_KEYS))
        network = self._network(_Section("network", document.get("network"), self.NETWORK_KEYS))
        sweep = self._sweep(_Section("sweep", document.get("sweep"), self.SWEEP_KEYS), network)
        quadrature = self._quadrature(_Section("quadrature", document.get("quadrature"), self.QUADRATURE_KEYS))
        validation = self._validation(_Section("validation", document.get("validation"), self.VALIDATION_KEYS))
        self._check_truncation(quadrature, network, sweep)
        return ScenarioConfig(channel, network, sweep, quadrature, validation)

    @staticmethod
    def _check_truncation(quadrature: QuadratureSettings, network: NetworkConfig, sweep: SweepSpec) -> None:
        # A fixed r_max must clear every altitude the run will visit
        quadrature.validate(h=max((network.h, *sweep.heights)))

    def _check_version(self, metadata: Any) -> None:
        if metadata is None:
            return
        if not isinstance(metadata, dict):
            raise ConfigurationError("uavcov metadata must be a mapping", key="uavcov")
        version = str(metadata.get("version", self.FORMAT_VERSION))
        if version not in self.SUPPORTED_VERSIONS:
            raise ConfigurationError(f"unsupported config version: {version}", key="uavcov.version")

    def _channel(self, s: _Section) -> ChannelParams:
        if not s.data:
            return default_channel_params()
        nakagami_los = self._nakagami(s, "los")
        nakagami_nlos = self._nakagami(s, "nlos")
        return ChannelParams(
            c_env=s.number("los_c"),
            y_env=s.number("los_y"),
            cl=10.0 ** s.number("cl_exp10"),
            cn=10.0 ** s.number("cn_exp10"),
            al=s.number("al"),
            an=s.number("an"),
            nakagami_los=nakagami_los,
            nakagami_nlos=nakagami_nlos,
        ).validate()

    @staticmethod
    def _nakagami(s: _Section, state: str) -> NakagamiParams:
        m = s.integer(f"m_{state}")
        omega = s.number(f"omega_{state}", 1.0)
        try:
            return NakagamiParams(m, omega)
        except ValidationError as e:
            key = f"channel.{e.key}_{state}"
            raise ValidationError(e.user_message, key=key, accepted=e.accepted) from e

    def _network(self, s: _Section) -> NetworkConfig:
        if not s.data:
            raise ConfigurationError("missing section network", key="network")
        return NetworkConfig.from_units(
            ptx_dbm=s.number("ptx_dbm"),
            n_uav=s.integer("n_uav"),
            n_ue=s.integer("n_ue"),
            nf_db=s.number("nf_db"),
            noise_dbm=s.number("noise_dbm"),
            lambda_per_km2=s.number("lambda_per_km2"),
            height_m=s.number("height_m"),
            gamma_db=s.number("gamma_db"),
            aoi_radius_m=s.number("aoi_radius_m", 2000.0),
        )

    def _sweep(self, s: _Section, network: NetworkConfig) -> SweepSpec:
        # Axes left out collapse to the single network point
        return SweepSpec(
            heights=_number_list(s, "heights_m") if s.has("heights_m") else (network.h,),
            densities=(
                _number_list(s, "lambdas_per_km2")
                if s.has("lambdas_per_km2")
                else (_round_density(network.lambda_per_km2),)
            ),
            thresholds_db=(
                _number_list(s, "gammas_db") if s.has("gammas_db") else (_round_db(network.gamma_db),)
            ),
            antenna_configs=(
                _antenna_list(s, "antennas") if s.has("antennas") else ((network.n_uav, network.n_ue),)
            ),
        ).validate()

    def _quadrature(self, s: _Section) -> QuadratureSettings:
        defaults = QuadratureSettings()
        r_max = s.raw("r_max_m", None)
        return QuadratureSettings(
            abs_tol=s.number("abs_tol", defaults.abs_tol),
            rel_tol=s.number("rel_tol", defaults.rel_tol),
            max_depth=s.integer("max_depth", defaults.max_depth),
            r_max=None if r_max is None else s.number("r_max_m"),
            max_subintervals=s.integer("max_subintervals", defaults.max_subintervals),
            tail_tol=s.number("tail_tol", defaults.tail_tol),
        ).validate()

    def _validation(self, s: _Section) -> ValidationSettings:
        defaults = ValidationSettings()
        return ValidationSettings(
            confidence=s.number("confidence", defaults.confidence),
            max_flagged_fraction=s.number("max_flagged_fraction", app_config.DEFAULT_MAX_FLAGGED_FRACTION),
        ).validate()

    # ------------------------------------------------------------------
    # Saving
    # ------------------------------------------------------------------

    def to_dict(self, config: ScenarioConfig) -> dict[str, Any]:
        channel, network, sweep, quadrature, validation = config
        return {
            "uavcov": {"version": self.FORMAT_VERSION},
            "channel": {
                "los_c": channel.c_env,
                "los_y": channel.y_env,
                "cl_exp10": round(math.log10(channel.cl), _EXP10_DIGITS),
                "cn_exp10": round(math.log10(channel.cn), _EXP10_DIGITS),
                "al": channel.al,
                "an": channel.an,
                "m_los": channel.nakagami_los.m,
                "m_nlos": channel.nakagami_nlos.m,
                "omega_los": channel.nakagami_los.omega,
                "omega_nlos": channel.nakagami_nlos.omega,
            },
            "network": {
                "ptx_dbm": _round_db(watt_to_dbm(network.ptx)),
                "n_uav": network.n_uav,
                "n_ue": network.n_ue,
                "nf_db": _round_db(linear_to_db(network.nf)),
                "noise_dbm": _round_db(watt_to_dbm(network.noise)),
                "lambda_per_km2": _round_density(network.lambda_per_km2),
                "height_m": network.h,
                "gamma_db": _round_db(linear_to_db(network.gamma)),
                "aoi_radius_m": network.aoi_radius,
            },
            "sweep": {
                "heights_m": list(sweep.heights),
                "lambdas_per_km2": list(sweep.densities),
                "gammas_db": list(sweep.thresholds_db),
                "antennas": [list(pair) for pair in sweep.antenna_configs],
            },
            "quadrature": {
                "abs_tol": quadrature.abs_tol,
                "rel_tol": quadrature.rel_tol,
                "max_depth": quadrature.max_depth,
                "max_subintervals": quadrature.max_subintervals,
                "tail_tol": quadrature.tail_tol,
                "r_max_m": quadrature.r_max,
            },
            "validation": {
                "confidence": validation.confidence,
                "max_flagged_fraction": validation.max_flagged_fraction,
            },
        }

    def dumps(self, config: ScenarioConfig) -> str:
        return yaml.safe_dump(self.to_dict(config), sort_keys=False)

    def save(self, config: ScenarioConfig, path: str | Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.dumps(config), encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"cannot write config file {path}: {e.strerror or e}") from e
        logger.info("Wrote scenario config to %s", path)
        return path


def _round_db(value: float) -> float:
    return round(value, _DB_DIGITS) + 0.0


def _round_density(value: float) -> float:
    return round(value, _DENSITY_DIGITS) + 0.0


def load_config(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario file."""
    return ConfigManager().load(path)


def save_config(config: ScenarioConfig, path: str | Path) -> Path:
    """Write a scenario file that `load_config` reads back unchanged."""
    return ConfigManager().save(config, path)
