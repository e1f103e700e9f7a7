"""
Scenario parameters.

Dataclasses for the channel environment, the network deployment, quadrature
controls, sweep grids and result rows. Every quantity is stored in linear SI
units (watts, ratios, UAVs per m^2); the dB/dBm/per-km^2 forms exist only at
the config boundary and in reports.
"""

import itertools
import math
from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from enum import Enum

from core.exceptions import ValidationError
from services.special_functions import (
    NakagamiParams,
    db_to_linear,
    dbm_to_watt,
    linear_to_db,
    watt_to_dbm,
)

PER_KM2_TO_PER_M2 = 1e-6
DEFAULT_AOI_RADIUS_M = 2000.0


class LinkState(Enum):
    """Propagation state of an air-to-ground link."""

    LOS = "LOS"
    NLOS = "NLOS"

    @property
    def opposite(self) -> "LinkState":
        """The other state (LOS <-> NLOS)."""
        return LinkState.NLOS if self is LinkState.LOS else LinkState.LOS


def _require(condition: bool, message: str, key: str, accepted: str) -> None:
    if not condition:
        raise ValidationError(message, key=key, accepted=accepted)


def _finite(value: float) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


# ============================================================================
# Channel environment
# ============================================================================


@dataclass(frozen=True)
class ChannelParams:
    """Environment constants: LOS sigmoid, per-state path gain and fading."""

    c_env: float = 9.6117
    y_env: float = 0.1581
    cl: float = 10.0**-6.14
    cn: float = 10.0**-7.2
    al: float = 2.0
    an: float = 2.92
    nakagami_los: NakagamiParams = field(default_factory=lambda: NakagamiParams(3, 1.0))
    nakagami_nlos: NakagamiParams = field(default_factory=lambda: NakagamiParams(2, 1.0))

    def intercept(self, state: LinkState) -> float:
        """Path-gain intercept C_i at 1 m."""
        return self.cl if state is LinkState.LOS else self.cn

    def exponent(self, state: LinkState) -> float:
        """Path-loss exponent a_i."""
        return self.al if state is LinkState.LOS else self.an

    def nakagami(self, state: LinkState) -> NakagamiParams:
        return self.nakagami_los if state is LinkState.LOS else self.nakagami_nlos

    def validate(self, prefix: str = "channel") -> "ChannelParams":
        """Check the ordering invariants of an urban LOS/NLOS environment."""
        for name in ("c_env", "y_env", "cl", "cn", "al", "an"):
            value = getattr(self, name)
            _require(_finite(value), f"{prefix}.{name} must be finite", f"{prefix}.{name}", "finite")
        _require(self.c_env > 0, "LOS sigmoid offset must be > 0", f"{prefix}.los_c", "> 0")
        _require(self.y_env > 0, "LOS sigmoid slope must be > 0", f"{prefix}.los_y", "> 0")
        _require(
            0 < self.cn < self.cl <= 1,
            f"intercepts must satisfy 0 < C_N < C_L <= 1, got C_L={self.cl}, C_N={self.cn}",
            f"{prefix}.cn_exp10",
            "0 < C_N < C_L <= 1",
        )
        _require(
            2 <= self.al < self.an,
            f"exponents must satisfy 2 <= a_L < a_N, got a_L={self.al}, a_N={self.an}",
            f"{prefix}.an",
            "2 <= a_L < a_N",
        )
        return self


# ============================================================================
# Network deployment
# ============================================================================


@dataclass(frozen=True)
class NetworkConfig:
    """Radio and deployment parameters of one evaluation point (linear units)."""

    ptx: float
    n_uav: int
    n_ue: int
    nf: float
    noise: float
    lambda_uav: float
    h: float
    gamma: float
    aoi_radius: float = DEFAULT_AOI_RADIUS_M

    @property
    def gain(self) -> float:
        """Sectored beamforming gain G = N_UAV x N_UE."""
        return float(self.n_uav * self.n_ue)

    @property
    def lambda_per_km2(self) -> float:
        return self.lambda_uav / PER_KM2_TO_PER_M2

    @property
    def gamma_db(self) -> float:
        return linear_to_db(self.gamma)

    @property
    def ptx_dbm(self) -> float:
        return watt_to_dbm(self.ptx)

    @property
    def nf_db(self) -> float:
        return linear_to_db(self.nf)

    @property
    def noise_dbm(self) -> float:
        return watt_to_dbm(self.noise)

    @classmethod
    def from_units(
        cls,
        *,
        ptx_dbm: float = 20.0,
        n_uav: int = 8,
        n_ue: int = 8,
        nf_db: float = 5.0,
        noise_dbm: float = -84.0,
        lambda_per_km2: float = 5.0,
        height_m: float = 200.0,
        gamma_db: float = 0.0,
        aoi_radius_m: float = DEFAULT_AOI_RADIUS_M,
    ) -> "NetworkConfig":
        """Build a config from report units (dBm, dB, per km^2)."""
        return cls(
            ptx=dbm_to_watt(ptx_dbm),
            n_uav=n_uav,
            n_ue=n_ue,
            nf=db_to_linear(nf_db),
            noise=dbm_to_watt(noise_dbm),
            lambda_uav=lambda_per_km2 * PER_KM2_TO_PER_M2,
            h=height_m,
            gamma=db_to_linear(gamma_db),
            aoi_radius=aoi_radius_m,
        ).validate()

    def with_point(
        self,
        *,
        height_m: float | None = None,
        lambda_per_km2: float | None = None,
        gamma_db: float | None = None,
        antenna: tuple[int, int] | None = None,
    ) -> "NetworkConfig":
        """Copy with one sweep point's coordinates substituted."""
        changes: dict[str, float | int] = {}
        if height_m is not None:
            changes["h"] = float(height_m)
        if lambda_per_km2 is not None:
            changes["lambda_uav"] = float(lambda_per_km2) * PER_KM2_TO_PER_M2
        if gamma_db is not None:
            changes["gamma"] = db_to_linear(gamma_db)
        if antenna is not None:
            changes["n_uav"], changes["n_ue"] = antenna
        return replace(self, **changes).validate()

    def validate(self, prefix: str = "network") -> "NetworkConfig":
        """
        Check ranges. Density may be 0 (the empty-network limit); every other
        radio quantity must be strictly positive and the altitude non-negative.
        """
        for name, key in (
            ("ptx", "ptx_dbm"),
            ("nf", "nf_db"),
            ("noise", "noise_dbm"),
            ("gamma", "gamma_db"),
            ("aoi_radius", "aoi_radius_m"),
        ):
            value = getattr(self, name)
            _require(
                _finite(value) and value > 0,
                f"{prefix}.{key} out of range: {value}",
                f"{prefix}.{key}",
                "> 0 (finite)",
            )
        for name in ("n_uav", "n_ue"):
            value = getattr(self, name)
            _require(
                isinstance(value, int) and not isinstance(value, bool) and value >= 1,
                f"{prefix}.{name} must be an integer >= 1, got {value!r}",
                f"{prefix}.{name}",
                "integer >= 1",
            )
        _require(
            _finite(self.lambda_uav) and self.lambda_uav >= 0,
            f"{prefix}.lambda_per_km2 must be >= 0, got {self.lambda_per_km2}",
            f"{prefix}.lambda_per_km2",
            ">= 0",
        )
        _require(
            _finite(self.h) and self.h >= 0,
            f"{prefix}.height_m must be >= 0, got {self.h}",
            f"{prefix}.height_m",
            ">= 0",
        )
        return self


# ============================================================================
# Quadrature controls
# ============================================================================


@dataclass(frozen=True)
class QuadratureSettings:
    """
    Accuracy controls for the nested integrals.

    `max_depth` bounds the bisection depth of the inner exclusion-integral
    panels; `max_subintervals` is the subinterval budget of each outer adaptive
    integral. `r_max=None` lets the engine pick the truncation radius from
    `tail_tol`.
    """

    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_depth: int = 30
    r_max: float | None = None
    max_subintervals: int = 500
    tail_tol: float = 1e-8

    def validate(self, prefix: str = "quadrature", h: float | None = None) -> "QuadratureSettings":
        for name in ("abs_tol", "rel_tol", "tail_tol"):
            value = getattr(self, name)
            _require(_finite(value) and value > 0, f"{prefix}.{name} must be > 0", f"{prefix}.{name}", "> 0")
        for name in ("max_depth", "max_subintervals"):
            value = getattr(self, name)
            _require(
                isinstance(value, int) and value >= 1,
                f"{prefix}.{name} must be an integer >= 1",
                f"{prefix}.{name}",
                "integer >= 1",
            )
        if self.r_max is not None:
            _require(_finite(self.r_max) and self.r_max > 0, f"{prefix}.r_max_m must be > 0", f"{prefix}.r_max_m", "> 0")
            if h is not None:
                _require(self.r_max > h, f"{prefix}.r_max_m must exceed the altitude {h}", f"{prefix}.r_max_m", f"> {h}")
        return self

    def halved(self) -> "QuadratureSettings":
        """Same settings with both tolerances halved."""
        return replace(self, abs_tol=self.abs_tol / 2, rel_tol=self.rel_tol / 2)


# ============================================================================
# Sweeps and results
# ============================================================================


@dataclass(frozen=True)
class SweepPoint:
    """One grid point, in the units rows are reported in."""

    gamma_db: float
    height_m: float
    lambda_per_km2: float
    n_uav: int
    n_ue: int

    @property
    def antenna(self) -> tuple[int, int]:
        return (self.n_uav, self.n_ue)


@dataclass(frozen=True)
class SweepSpec:
    """Axes of a Cartesian evaluation grid."""

    heights: tuple[float, ...]
    densities: tuple[float, ...]
    thresholds_db: tuple[float, ...]
    antenna_configs: tuple[tuple[int, int], ...]

    def validate(self, prefix: str = "sweep") -> "SweepSpec":
        for name, key in (
            ("heights", "heights_m"),
            ("densities", "lambdas_per_km2"),
            ("thresholds_db", "gammas_db"),
            ("antenna_configs", "antennas"),
        ):
            _require(len(getattr(self, name)) > 0, f"{prefix}.{key} must not be empty", f"{prefix}.{key}", "non-empty list")
        for h in self.heights:
            _require(_finite(h) and h >= 0, f"{prefix}.heights_m contains {h}", f"{prefix}.heights_m", ">= 0")
        for lam in self.densities:
            _require(_finite(lam) and lam >= 0, f"{prefix}.lambdas_per_km2 contains {lam}", f"{prefix}.lambdas_per_km2", ">= 0")
        for gamma_db in self.thresholds_db:
            _require(_finite(gamma_db), f"{prefix}.gammas_db contains {gamma_db}", f"{prefix}.gammas_db", "finite")
        for pair in self.antenna_configs:
            _require(
                len(pair) == 2 and all(isinstance(n, int) and n >= 1 for n in pair),
                f"{prefix}.antennas contains {pair!r}",
                f"{prefix}.antennas",
                "pairs of integers >= 1",
            )
        return self

    def points(self) -> Iterator[SweepPoint]:
        """Grid points in lexicographic order of (gamma, height, density, antenna)."""
        for gamma_db, h, lam, (n_uav, n_ue) in itertools.product(
            sorted(self.thresholds_db),
            sorted(self.heights),
            sorted(self.densities),
            sorted(self.antenna_configs),
        ):
            yield SweepPoint(gamma_db, h, lam, n_uav, n_ue)

    def __len__(self) -> int:
        return (
            len(self.heights)
            * len(self.densities)
            * len(self.thresholds_db)
            * len(self.antenna_configs)
        )

    def restrict(
        self,
        *,
        heights: list[float] | None = None,
        densities: list[float] | None = None,
        thresholds_db: list[float] | None = None,
        antenna_configs: list[tuple[int, int]] | None = None,
    ) -> "SweepSpec":
        """Intersect each axis with the given values (None keeps the axis)."""

        def keep(axis: tuple, wanted: list | None) -> tuple:
            if wanted is None:
                return axis
            return tuple(v for v in axis if any(_same(v, w) for w in wanted))

        return SweepSpec(
            heights=keep(self.heights, heights),
            densities=keep(self.densities, densities),
            thresholds_db=keep(self.thresholds_db, thresholds_db),
            antenna_configs=keep(self.antenna_configs, antenna_configs),
        )


def _same(a: object, b: object) -> bool:
    if isinstance(a, tuple) or isinstance(b, tuple):
        return tuple(a) == tuple(b)  # type: ignore[arg-type]
    return math.isclose(float(a), float(b), rel_tol=1e-12, abs_tol=1e-12)  # type: ignore[arg-type]


@dataclass(frozen=True)
class ValidationSettings:
    """Acceptance controls for `validate` runs."""

    confidence: float = 0.99
    max_flagged_fraction: float = 0.05

    def validate(self, prefix: str = "validation") -> "ValidationSettings":
        _require(
            _finite(self.confidence) and 0 < self.confidence < 1,
            f"{prefix}.confidence must lie in (0, 1)",
            f"{prefix}.confidence",
            "(0, 1)",
        )
        _require(
            _finite(self.max_flagged_fraction) and 0 <= self.max_flagged_fraction <= 1,
            f"{prefix}.max_flagged_fraction must lie in [0, 1]",
            f"{prefix}.max_flagged_fraction",
            "[0, 1]",
        )
        return self


@dataclass
class ResultRow:
    """One CSV row. MC fields are all set or all None."""

    gamma_db: float
    height_m: float
    lambda_per_km2: float
    n_uav: int
    n_ue: int
    pcov_analytic: float | None
    pcov_mc: float | None = None
    mc_ci_low: float | None = None
    mc_ci_high: float | None = None
    n_realizations: int | None = None
    seed: int | None = None
    error: str | None = None
    flagged: bool = False

    @property
    def has_mc(self) -> bool:
        return self.pcov_mc is not None

    @property
    def group_key(self) -> tuple[float, float, int, int]:
        """Rows sharing a key form one altitude curve (gamma, density, antenna)."""
        return (self.gamma_db, self.lambda_per_km2, self.n_uav, self.n_ue)


# ============================================================================
# Shipped defaults
# ============================================================================

TABLE_HEIGHTS_M: tuple[float, ...] = tuple(float(h) for h in range(0, 1001, 50))
TABLE_DENSITIES_PER_KM2: tuple[float, ...] = (1.0, 5.0, 10.0, 15.0, 25.0)
TABLE_THRESHOLDS_DB: tuple[float, ...] = (-5.0, 0.0, 5.0)
TABLE_ANTENNAS: tuple[tuple[int, int], ...] = ((8, 4), (8, 8), (64, 4), (256, 4), (256, 8))


def default_channel_params() -> ChannelParams:
    """Urban channel constants (LOS/NLOS intercepts, exponents, fading, sigmoid)."""
    return ChannelParams()


def default_network_config() -> NetworkConfig:
    """20 dBm, 8x8 array, NF 5 dB, -84 dBm noise, 5 UAVs/km^2 at 200 m, 0 dB threshold."""
    return NetworkConfig.from_units()


def default_sweep_spec() -> SweepSpec:
    return SweepSpec(
        heights=TABLE_HEIGHTS_M,
        densities=TABLE_DENSITIES_PER_KM2,
        thresholds_db=TABLE_THRESHOLDS_DB,
        antenna_configs=TABLE_ANTENNAS,
    )
