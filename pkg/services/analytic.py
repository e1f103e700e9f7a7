"""
Analytic Coverage Engine

Closed-form coverage machinery for a ground UE served by UAVs forming a
homogeneous PPP at altitude h, thinned into independent LOS and NLOS
processes:

- void probabilities and nearest-UAV distance CDF/PDF per state
- association probabilities P_L, P_N (max-path-gain rule)
- association-distance densities
- Nakagami conditional coverage and the total coverage probability

Outer integrals run through scipy's adaptive QUADPACK routine; the inner
exclusion integrals come from the tabulated antiderivatives in
`state.exclusion_cache`.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.integrate import quad

from core.exceptions import NumericalError, QuadratureError, ValidationError
from services.channel import equivalent_distance, horizontal_distance, los_probability_horizontal
from services.special_functions import nakagami_ccdf
from state.exclusion_cache import ExclusionTable, build_exclusion_table, get_exclusion_table
from state.params import ChannelParams, LinkState, NetworkConfig, QuadratureSettings

logger = logging.getLogger(__name__)

LosProbability = Callable[[float, npt.NDArray[np.float64]], npt.NDArray[np.float64]]

STATES = (LinkState.LOS, LinkState.NLOS)

# Default truncation radius is this many AoI radii (horizontally)
_R_MAX_AOI_FACTOR = 3.0
_R_MAX_CEILING = 1e7

# A roundoff-limited QUADPACK result is accepted when the error estimate is this close to target
_ROUNDOFF_SLACK = 10.0


@dataclass(frozen=True)
class CoverageBreakdown:
    """Coverage split by serving state, with the association probabilities."""

    association_los: float
    association_nlos: float
    coverage_los: float
    coverage_nlos: float
    r_max: float

    @property
    def total(self) -> float:
        return min(1.0, max(0.0, self.coverage_los + self.coverage_nlos))

    @property
    def association_total(self) -> float:
        return self.association_los + self.association_nlos


class CoverageAnalyzer:
    """
    Evaluates the analytic coverage model for one (channel, network) point.

    `los_probability` replaces the elevation sigmoid with any vectorized
    p_L(h, rho); it exists so degenerate channels can be checked against
    closed-form answers. Custom models bypass the shared table cache.
    """

    def __init__(
        self,
        params: ChannelParams,
        config: NetworkConfig,
        settings: QuadratureSettings | None = None,
        los_probability: LosProbability | None = None,
    ):
        self.params = params
        self.config = config.validate()
        self.settings = (settings or QuadratureSettings()).validate(h=config.h)
        self._custom_los = los_probability
        self._tables: dict[LinkState, ExclusionTable] = {}
        self._r_max: float | None = None

    # ------------------------------------------------------------------
    # Geometry helpers
    # ------------------------------------------------------------------

    @property
    def h(self) -> float:
        return self.config.h

    @property
    def _two_pi_lambda(self) -> float:
        return 2.0 * math.pi * self.config.lambda_uav

    def _check_distance(self, r: float) -> float:
        r = float(r)
        if not math.isfinite(r) or r < self.h:
            raise ValidationError(
                f"distance must satisfy r >= h = {self.h}, got {r}", key="r", accepted=f">= {self.h}"
            )
        return r

    def state_probability(self, state: LinkState, rho: float) -> float:
        """p_i at horizontal distance rho (arctan form)."""
        if self.h == 0.0 and rho == 0.0:
            raise ValidationError("elevation undefined at h = rho = 0", key="rho")
        rho_arr = np.asarray([float(rho)])
        if self._custom_los is not None:
            p_los = float(np.asarray(self._custom_los(self.h, rho_arr))[0])
        else:
            p_los = float(los_probability_horizontal(self.params, self.h, rho_arr)[0])
        return p_los if state is LinkState.LOS else 1.0 - p_los

    def _table(self, state: LinkState) -> ExclusionTable:
        table = self._tables.get(state)
        if table is None:
            if self._custom_los is None:
                table = get_exclusion_table(self.params, state, self.h, self.settings)
            else:
                los = self._custom_los
                h = self.h
                if state is LinkState.LOS:
                    integrand = lambda rho: np.asarray(los(h, rho)) * rho  # noqa: E731
                else:
                    integrand = lambda rho: (1.0 - np.asarray(los(h, rho))) * rho  # noqa: E731
                table = build_exclusion_table(
                    integrand, h, self.settings, name=f"exclusion_integral[{state.value}]"
                )
            self._tables[state] = table
        return table

    # ------------------------------------------------------------------
    # Void probabilities and nearest-UAV distances
    # ------------------------------------------------------------------

    def exclusion_integral(self, state: LinkState, b_upper: float) -> float:
        """int_0^b_upper p_i(rho) rho drho."""
        b_upper = float(b_upper)
        if not math.isfinite(b_upper) or b_upper < 0:
            raise ValidationError(f"b_upper must be >= 0, got {b_upper}", key="b_upper", accepted=">= 0")
        return self._table(state).value(b_upper)

    def void_probability(self, state: LinkState, b_upper: float) -> float:
        """P[no state-i UAV within horizontal radius b_upper]."""
        if self.config.lambda_uav == 0.0:
            return 1.0
        return math.exp(-self._two_pi_lambda * self.exclusion_integral(state, b_upper))

    def nearest_cdf(self, state: LinkState, r: float) -> float:
        """P[nearest state-i UAV is within 3D distance r]."""
        r = self._check_distance(r)
        if self.config.lambda_uav == 0.0:
            return 0.0
        b = float(horizontal_distance(self.h, r))
        return -math.expm1(-self._two_pi_lambda * self.exclusion_integral(state, b))

    def nearest_pdf(self, state: LinkState, r: float) -> float:
        """Density of the distance to the nearest state-i UAV."""
        r = self._check_distance(r)
        if self.config.lambda_uav == 0.0 or r == 0.0:
            return 0.0
        b = float(horizontal_distance(self.h, r))
        p_state = self.state_probability(state, b)
        if p_state <= 0.0:
            return 0.0
        return self._two_pi_lambda * r * p_state * self.void_probability(state, b)

    # ------------------------------------------------------------------
    # Association
    # ------------------------------------------------------------------

    def _opposite_void(self, state: LinkState, r: float) -> float:
        """P[no opposite-state UAV beats a state-i UAV at distance r]."""
        a_dist = float(equivalent_distance(self.params, state, r))
        if a_dist <= self.h:
            # Nothing can be closer than the altitude, so the exclusion disk is empty
            return 1.0
        return self.void_probability(state.opposite, float(horizontal_distance(self.h, a_dist)))

    def association_pdf(self, state: LinkState, r: float) -> float:
        """Density of the serving distance when the serving UAV is in `state`."""
        f_nearest = self.nearest_pdf(state, r)
        if f_nearest == 0.0:
            return 0.0
        return self._opposite_void(state, r) * f_nearest

    def association_probability(self, state: LinkState) -> float:
        """P[serving UAV is in `state`]."""
        if self.config.lambda_uav == 0.0:
            return 0.0
        value = self._integrate(
            lambda r: self.association_pdf(state, r),
            state,
            f"association_probability[{state.value}]",
        )
        return min(1.0, max(0.0, value))

    # ------------------------------------------------------------------
    # Coverage
    # ------------------------------------------------------------------

    def snr_scale(self, state: LinkState) -> float:
        """zeta_i(r) / r^{a_i}: Gamma * NF * sigma^2 / (P_TX * G * C_i)."""
        cfg = self.config
        return cfg.gamma * cfg.nf * cfg.noise / (cfg.ptx * cfg.gain * self.params.intercept(state))

    def conditional_coverage(self, state: LinkState, r: float) -> float:
        """P[SNR > Gamma | serving state-i UAV at distance r]."""
        r = self._check_distance(r)
        zeta = self.snr_scale(state) * r ** self.params.exponent(state)
        if not math.isfinite(zeta):
            return 0.0
        return nakagami_ccdf(self.params.nakagami(state), zeta)

    def _coverage_term(self, state: LinkState) -> float:
        if self.config.lambda_uav == 0.0:
            return 0.0

        def integrand(r: float) -> float:
            f_bar = self.association_pdf(state, r)
            if f_bar == 0.0:
                return 0.0
            return self.conditional_coverage(state, r) * f_bar

        return max(0.0, self._integrate(integrand, state, f"coverage_probability[{state.value}]"))

    def coverage_probability(self) -> float:
        """P_cov(Gamma) summed over both serving states."""
        total = sum(self._coverage_term(state) for state in STATES)
        return min(1.0, max(0.0, total))

    def coverage_breakdown(self) -> CoverageBreakdown:
        """Per-state coverage contributions and association probabilities."""
        return CoverageBreakdown(
            association_los=self.association_probability(LinkState.LOS),
            association_nlos=self.association_probability(LinkState.NLOS),
            coverage_los=self._coverage_term(LinkState.LOS),
            coverage_nlos=self._coverage_term(LinkState.NLOS),
            r_max=self.resolve_r_max(),
        )

    # ------------------------------------------------------------------
    # Outer integration
    # ------------------------------------------------------------------

    def resolve_r_max(self) -> float:
        """
        Upper limit of the outer integrals.

        An explicit `settings.r_max` wins. Otherwise start from three AoI radii
        and double the horizontal reach until, for every state that has UAVs at
        all, the probability of no UAV of that state within reach is below
        `tail_tol`.
        """
        if self._r_max is not None:
            return self._r_max
        h = self.h
        if self.settings.r_max is not None:
            self._r_max = float(self.settings.r_max)
            return self._r_max

        b = _R_MAX_AOI_FACTOR * self.config.aoi_radius
        if self.config.lambda_uav > 0.0:
            while True:
                worst = 0.0
                for state in STATES:
                    mass = self.exclusion_integral(state, b)
                    if mass > 0.0:
                        worst = max(worst, math.exp(-self._two_pi_lambda * mass))
                if worst < self.settings.tail_tol:
                    break
                if math.hypot(h, 2.0 * b) > _R_MAX_CEILING:
                    logger.warning(
                        "Truncation radius capped at %.3g m; residual tail mass %.3g", math.hypot(h, b), worst
                    )
                    break
                b *= 2.0
        self._r_max = math.hypot(h, b)
        logger.debug("r_max resolved to %.6g m (h=%.6g m)", self._r_max, h)
        return self._r_max

    def _breakpoints(self, state: LinkState, r_max: float) -> list[float]:
        """Interior points where the outer integrands change character."""
        h = self.h
        scale = max(h, 10.0)
        candidates = [math.hypot(h, scale * 2.0**k) for k in range(-2, 6)]
        candidates.append(math.hypot(h, self.config.aoi_radius))
        # Where the exclusion disk of the opposite state starts to open
        if h > 0:
            candidates.append(float(equivalent_distance(self.params, state.opposite, h)))
        # Fading cliff: zeta_i(r) = 1 and its neighbourhood
        cliff = (1.0 / self.snr_scale(state)) ** (1.0 / self.params.exponent(state))
        candidates.extend(cliff * f for f in (0.5, 1.0, 2.0))
        return sorted({c for c in candidates if h < c < r_max and math.isfinite(c)})

    def _integrate(self, func: Callable[[float], float], state: LinkState, name: str) -> float:
        r_max = self.resolve_r_max()
        settings = self.settings
        try:
            result = quad(
                func,
                self.h,
                r_max,
                epsabs=settings.abs_tol,
                epsrel=settings.rel_tol,
                limit=settings.max_subintervals,
                points=self._breakpoints(state, r_max) or None,
                full_output=1,
            )
        except QuadratureError as e:
            raise QuadratureError(f"{name}: {e.user_message}", integral=e.integral or name) from e
        except (ValueError, ArithmeticError) as e:
            raise NumericalError(f"{name}: {e}") from e
        value, abserr, info = result[0], result[1], result[2]
        if len(result) > 3:
            message = " ".join(str(result[3]).split())
            target = max(settings.abs_tol, settings.rel_tol * abs(value))
            if "roundoff" not in message or abserr > _ROUNDOFF_SLACK * target:
                raise QuadratureError(
                    f"{name} did not converge (error estimate {abserr:.3g}): {message}",
                    integral=name,
                )
            logger.warning("%s: accepting result limited by roundoff (error estimate %.3g)", name, abserr)
        logger.debug("%s = %.12g (+/- %.2g, %d evaluations)", name, value, abserr, info["neval"])
        return float(value)


def coverage_probability(
    params: ChannelParams,
    config: NetworkConfig,
    settings: QuadratureSettings | None = None,
) -> float:
    """P_cov(Gamma) for one configuration."""
    return CoverageAnalyzer(params, config, settings).coverage_probability()


def optimal_height(
    params: ChannelParams,
    config: NetworkConfig,
    h_grid: Sequence[float],
    settings: QuadratureSettings | None = None,
) -> tuple[float, float]:
    """
    Grid search for the altitude maximizing coverage.

    Returns (h_opt, P_cov(h_opt)). Ties go to the lower altitude.

    Raises:
        ValidationError: empty or non-increasing grid
        QuadratureError: any grid point fails to integrate
    """
    grid = [float(h) for h in h_grid]
    if not grid:
        raise ValidationError("altitude grid must not be empty", key="h_grid", accepted="non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:], strict=False)):
        raise ValidationError("altitude grid must be strictly increasing", key="h_grid")

    best_h, best_p = grid[0], -1.0
    for h in grid:
        p = coverage_probability(params, config.with_point(height_m=h), settings)
        if p > best_p:
            best_h, best_p = h, p
    logger.info("Optimal altitude %.6g m with P_cov=%.6f over %d grid points", best_h, best_p, len(grid))
    return best_h, best_p
