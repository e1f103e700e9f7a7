"""
Channel Model

Geometry-dependent primitives of the air-to-ground link: the elevation-angle
LOS probability (in both the 3D-distance and horizontal-distance forms), the
per-state path gain and the cross-state equivalent distance.

All functions accept scalars or numpy arrays. Angles stay in radians; the
conversion to degrees happens once, inside the sigmoid.
"""

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from core.exceptions import ValidationError
from state.params import ChannelParams, LinkState

ArrayLike = float | npt.NDArray[np.float64]

_RAD_TO_DEG = 180.0 / math.pi


def _as_array(value: ArrayLike, key: str) -> npt.NDArray[np.float64]:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{key} must be finite", key=key, accepted="finite")
    return arr


def _unwrap(arr: npt.NDArray[np.float64]) -> ArrayLike:
    return float(arr) if arr.ndim == 0 else arr


def horizontal_distance(h: ArrayLike, r: ArrayLike) -> ArrayLike:
    """b(r) = sqrt(r^2 - h^2), clamped at 0 against rounding when r == h."""
    h_arr = np.asarray(h, dtype=float)
    r_arr = np.asarray(r, dtype=float)
    return _unwrap(np.sqrt(np.maximum(r_arr * r_arr - h_arr * h_arr, 0.0)))


@dataclass(frozen=True)
class Geometry:
    """UE-UAV geometry: altitude h, 3D distance r and horizontal distance b."""

    h: float
    r: float
    b: float

    @classmethod
    def from_3d(cls, h: float, r: float) -> "Geometry":
        if h < 0 or r < h:
            raise ValidationError(f"need r >= h >= 0, got h={h}, r={r}", key="r", accepted=">= h")
        return cls(h=float(h), r=float(r), b=float(horizontal_distance(h, r)))

    @classmethod
    def from_horizontal(cls, h: float, b: float) -> "Geometry":
        if h < 0 or b < 0:
            raise ValidationError(f"need h, b >= 0, got h={h}, b={b}", key="b", accepted=">= 0")
        return cls(h=float(h), r=math.hypot(h, b), b=float(b))

    @property
    def elevation_deg(self) -> float:
        """Elevation angle seen from the UE, in degrees (90 when overhead)."""
        return math.atan2(self.h, self.b) * _RAD_TO_DEG


def _sigmoid(params: ChannelParams, theta_rad: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    exponent = -params.y_env * (theta_rad * _RAD_TO_DEG - params.c_env)
    return 1.0 / (1.0 + params.c_env * np.exp(exponent))


def p_los_3d(params: ChannelParams, h: ArrayLike, r: ArrayLike) -> ArrayLike:
    """
    LOS probability from the elevation angle arcsin(h/r).

    Raises:
        ValidationError: negative inputs, r == 0 or r < h
    """
    h_arr = _as_array(h, "h")
    r_arr = _as_array(r, "r")
    if np.any(h_arr < 0) or np.any(r_arr <= 0):
        raise ValidationError("need h >= 0 and r > 0", key="r", accepted="> 0")
    if np.any(r_arr < h_arr):
        raise ValidationError("3D distance cannot be shorter than the altitude", key="r", accepted=">= h")
    theta = np.arcsin(np.minimum(h_arr / r_arr, 1.0))
    return _unwrap(_sigmoid(params, theta))


def p_los_horizontal(params: ChannelParams, h: ArrayLike, rho: ArrayLike) -> ArrayLike:
    """
    LOS probability from the elevation angle arctan(h/rho).

    rho = 0 with h > 0 is the overhead case (90 degrees); h = rho = 0 has no
    defined angle and is rejected.
    """
    h_arr = _as_array(h, "h")
    rho_arr = _as_array(rho, "rho")
    if np.any(h_arr < 0) or np.any(rho_arr < 0):
        raise ValidationError("need h >= 0 and rho >= 0", key="rho", accepted=">= 0")
    if np.any((h_arr == 0) & (rho_arr == 0)):
        raise ValidationError("elevation undefined at h = rho = 0", key="rho", accepted="h > 0 or rho > 0")
    return _unwrap(_sigmoid(params, np.arctan2(h_arr, rho_arr)))


def los_probability_horizontal(
    params: ChannelParams, h: float, rho: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    """Unchecked vectorized arctan form for quadrature nodes (rho > 0 or h > 0)."""
    return _sigmoid(params, np.arctan2(h, rho))


def state_probability(
    params: ChannelParams, state: LinkState, h: ArrayLike, rho: ArrayLike
) -> ArrayLike:
    """p_i at horizontal distance rho; NLOS is the exact complement of LOS."""
    p_los = p_los_horizontal(params, h, rho)
    if state is LinkState.LOS:
        return p_los
    return _unwrap(1.0 - np.asarray(p_los))


def los_floor(params: ChannelParams) -> float:
    """Limit of the LOS probability as the elevation angle goes to 0."""
    return 1.0 / (1.0 + params.c_env * math.exp(params.y_env * params.c_env))


def path_gain(params: ChannelParams, state: LinkState, r: ArrayLike) -> ArrayLike:
    """C_i * r^(-a_i)."""
    r_arr = _as_array(r, "r")
    if np.any(r_arr <= 0):
        raise ValidationError("distance must be > 0", key="r", accepted="> 0")
    return _unwrap(params.intercept(state) * r_arr ** (-params.exponent(state)))


def equivalent_distance(params: ChannelParams, state: LinkState, r: ArrayLike) -> ArrayLike:
    """
    A_i(r): distance at which a UAV in the opposite state has the same path gain
    as a state-`state` UAV at distance r.
    """
    r_arr = _as_array(r, "r")
    if np.any(r_arr <= 0):
        raise ValidationError("distance must be > 0", key="r", accepted="> 0")
    other = state.opposite
    log_a = (
        math.log(params.intercept(other) / params.intercept(state))
        + params.exponent(state) * np.log(r_arr)
    ) / params.exponent(other)
    return _unwrap(np.exp(log_a))
