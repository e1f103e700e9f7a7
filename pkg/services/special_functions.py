"""
Special Functions

Scalar kernels shared by the analytic and Monte Carlo engines: the regularized
incomplete gamma function for integer shape, the Nakagami-m amplitude
distribution (CCDF and sampler) and the dB/dBm unit conversions applied when a
configuration is ingested.
"""

import math
from dataclasses import dataclass
from numbers import Integral, Real

import numpy as np
import numpy.typing as npt

from core.exceptions import ValidationError

# Series terms below this fraction of the running sum are dropped
_SERIES_EPS = 1e-17
_SERIES_MAX_TERMS = 10_000


@dataclass(frozen=True)
class NakagamiParams:
    """Nakagami-m fading parameters: integer shape `m` and spread `omega`."""

    m: int
    omega: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", _validate_shape(self.m, key="m"))
        omega = _validate_finite(self.omega, key="omega")
        if omega <= 0:
            raise ValidationError(
                f"Nakagami spread must be > 0, got {omega}", key="omega", accepted="> 0"
            )
        object.__setattr__(self, "omega", omega)


def _validate_finite(value: object, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ValidationError(f"{key} must be a real number, got {value!r}", key=key)
    result = float(value)
    if not math.isfinite(result):
        raise ValidationError(f"{key} must be finite, got {result}", key=key, accepted="finite")
    return result


def _validate_shape(m: object, key: str = "m") -> int:
    if isinstance(m, bool):
        raise ValidationError(f"{key} must be an integer >= 1, got {m!r}", key=key)
    if isinstance(m, Integral):
        shape = int(m)
    elif isinstance(m, Real) and math.isfinite(float(m)) and float(m).is_integer():
        shape = int(m)
    else:
        raise ValidationError(
            f"{key} must be an integer >= 1 (non-integer shapes are not supported), got {m!r}",
            key=key,
            accepted="integer >= 1",
        )
    if shape < 1:
        raise ValidationError(f"{key} must be >= 1, got {shape}", key=key, accepted="integer >= 1")
    return shape


def _validate_argument(x: object) -> float:
    value = _validate_finite(x, key="x")
    if value < 0:
        raise ValidationError(f"x must be >= 0, got {value}", key="x", accepted=">= 0")
    return value


def _erlang_head(m: int, x: float) -> float:
    """e^{-x} * sum_{k<m} x^k / k!  (the upper tail for integer m)."""
    term = 1.0
    total = 1.0
    for k in range(1, m):
        term *= x / k
        total += term
    return math.exp(-x) * total


def _erlang_series_tail(m: int, x: float) -> float:
    """e^{-x} * sum_{k>=m} x^k / k!  (the lower part, free of cancellation for small x)."""
    term = math.exp(-x)
    for k in range(1, m + 1):
        term *= x / k
    total = term
    k = m
    for _ in range(_SERIES_MAX_TERMS):
        k += 1
        term *= x / k
        total += term
        if term <= _SERIES_EPS * total:
            break
    return total


def regularized_lower_gamma(m: int, x: float) -> float:
    """
    Regularized lower incomplete gamma P(m, x) = gamma(m, x) / (m-1)!.

    Uses the Erlang closed form 1 - e^{-x} sum_{k<m} x^k/k!, switching to the
    equivalent power series when x < m so that small values keep full relative
    precision.

    Raises:
        ValidationError: m not an integer >= 1, or x negative / non-finite
    """
    shape = _validate_shape(m)
    value = _validate_argument(x)
    if value == 0.0:
        return 0.0
    if value < shape:
        return min(1.0, _erlang_series_tail(shape, value))
    return max(0.0, 1.0 - _erlang_head(shape, value))


def regularized_upper_gamma(m: int, x: float) -> float:
    """Regularized upper incomplete gamma Q(m, x) = 1 - P(m, x), computed directly."""
    shape = _validate_shape(m)
    value = _validate_argument(x)
    if value == 0.0:
        return 1.0
    if value < shape:
        return max(0.0, 1.0 - _erlang_series_tail(shape, value))
    return min(1.0, _erlang_head(shape, value))


def nakagami_ccdf(params: NakagamiParams, x: float) -> float:
    """P[g > x] for a Nakagami(m, omega) amplitude g: Q(m, (m/omega) * x^2)."""
    value = _validate_argument(x)
    return regularized_upper_gamma(params.m, (params.m / params.omega) * value * value)


def nakagami_cdf(params: NakagamiParams, x: float) -> float:
    """P[g <= x] for a Nakagami(m, omega) amplitude g."""
    value = _validate_argument(x)
    return regularized_lower_gamma(params.m, (params.m / params.omega) * value * value)


def nakagami_sample(
    params: NakagamiParams,
    rng: np.random.Generator,
    size: int | tuple[int, ...] | None = None,
) -> float | npt.NDArray[np.float64]:
    """
    Draw Nakagami(m, omega) amplitudes.

    The power g^2 is the sum of m unit exponentials scaled by omega/m (a gamma
    variate with shape m and mean omega); the amplitude is its square root.
    Only `rng` is mutated.
    """
    if size is None:
        power = float(rng.standard_exponential(params.m).sum()) * params.omega / params.m
        return math.sqrt(power)
    shape = (size,) if isinstance(size, int) else tuple(size)
    draws = rng.standard_exponential((*shape, params.m))
    return np.sqrt(draws.sum(axis=-1) * (params.omega / params.m))


# ============================================================================
# UNIT CONVERSIONS
# ============================================================================


def db_to_linear(x: float) -> float:
    """dB to linear ratio: 10^(x/10)."""
    value = _validate_finite(x, key="dB value")
    return 10.0 ** (value / 10.0)


def dbm_to_watt(x: float) -> float:
    """dBm to watts: 10^(x/10) * 1e-3."""
    value = _validate_finite(x, key="dBm value")
    return 10.0 ** (value / 10.0) * 1e-3


def linear_to_db(x: float) -> float:
    """Linear ratio to dB; the ratio must be positive."""
    value = _validate_finite(x, key="ratio")
    if value <= 0:
        raise ValidationError(f"ratio must be > 0 to express in dB, got {value}", key="ratio")
    return 10.0 * math.log10(value)


def watt_to_dbm(x: float) -> float:
    """Watts to dBm; the power must be positive."""
    value = _validate_finite(x, key="power")
    if value <= 0:
        raise ValidationError(f"power must be > 0 to express in dBm, got {value}", key="power")
    return 10.0 * math.log10(value * 1e3)
