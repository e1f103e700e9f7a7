"""
Monte Carlo Coverage Engine

System-level simulation used as an independent check on the analytic engine:
a PPP of UAVs over the disk-shaped area of interest, independent LOS thinning,
max-path-gain association, Nakagami fading on the serving link and a strict
SNR threshold test.

Realization k always draws from its own Philox stream keyed by
(master_seed, k), so an estimate does not depend on how the realizations are
split across worker processes.
"""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy.stats import norm

from core.exceptions import ValidationError
from services.channel import p_los_3d
from services.special_functions import nakagami_sample
from state.params import ChannelParams, LinkState, NetworkConfig

logger = logging.getLogger(__name__)

FadingSource = float | Callable[[LinkState], float]

# Chunks handed to each worker; more than one per worker keeps the pool busy
_CHUNKS_PER_WORKER = 4


@dataclass(frozen=True)
class Realization:
    """One simulated network snapshot and its coverage outcome."""

    uav_positions: npt.NDArray[np.float64]
    link_states: tuple[LinkState, ...]
    serving_index: int | None
    serving_state: LinkState | None
    serving_distance: float
    snr: float
    covered: bool

    @property
    def n_uavs(self) -> int:
        return len(self.link_states)


@dataclass(frozen=True)
class McEstimate:
    """Covered fraction over n realizations with its Wilson interval."""

    p_hat: float
    ci_low: float
    ci_high: float
    n: int
    seed: int
    serving_state_counts: tuple[int, int, int]
    confidence: float = 0.95
    los_distances: tuple[float, ...] = field(default=(), repr=False)
    nlos_distances: tuple[float, ...] = field(default=(), repr=False)

    @property
    def covered(self) -> int:
        return round(self.p_hat * self.n)

    def contains(self, value: float) -> bool:
        """True when `value` lies inside [ci_low, ci_high]."""
        return self.ci_low <= value <= self.ci_high

    def serving_fraction(self, state: LinkState) -> float:
        los, nlos, _ = self.serving_state_counts
        return (los if state is LinkState.LOS else nlos) / self.n


# ============================================================================
# Point process and single realizations
# ============================================================================


def generate_ppp(lambda_uav: float, radius: float, rng: np.random.Generator) -> npt.NDArray[np.float64]:
    """
    Homogeneous PPP of intensity `lambda_uav` (per m^2) on a disk of `radius` m.

    Returns an (N, 2) array of (x, y) positions; N is Poisson(lambda * pi * R^2).
    """
    if not math.isfinite(lambda_uav) or lambda_uav < 0:
        raise ValidationError(f"density must be >= 0, got {lambda_uav}", key="lambda", accepted=">= 0")
    if not math.isfinite(radius) or radius <= 0:
        raise ValidationError(f"radius must be > 0, got {radius}", key="radius", accepted="> 0")
    count = int(rng.poisson(lambda_uav * math.pi * radius * radius))
    if count == 0:
        return np.empty((0, 2))
    rho = radius * np.sqrt(rng.random(count))
    phi = 2.0 * math.pi * rng.random(count)
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi)))


def _select_serving(
    params: ChannelParams, distances: npt.NDArray[np.float64], is_los: npt.NDArray[np.bool_]
) -> int:
    """Index of the max-path-gain UAV; ties go to LOS, then to the lower index."""
    log_gain = np.where(
        is_los,
        math.log(params.cl) - params.al * np.log(distances),
        math.log(params.cn) - params.an * np.log(distances),
    )
    order = np.lexsort((np.arange(distances.size), ~is_los, -log_gain))
    return int(order[0])


def evaluate_realization(
    params: ChannelParams,
    config: NetworkConfig,
    positions: npt.NDArray[np.float64],
    link_states: tuple[LinkState, ...] | list[LinkState],
    fading: FadingSource,
) -> Realization:
    """
    Association and SNR test for a given geometry.

    `fading` is the serving link's Nakagami amplitude, or a callable drawing it
    for the serving state. SNR = P_TX * C_i r^-a_i * G * g / (NF * sigma^2).
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    states = tuple(link_states)
    if len(states) != positions.shape[0]:
        raise ValidationError(
            f"{positions.shape[0]} positions but {len(states)} link states", key="link_states"
        )
    if not states:
        return Realization(positions, states, None, None, math.inf, 0.0, False)

    h = config.h
    distances = np.sqrt(np.sum(positions * positions, axis=1) + h * h)
    if np.any(distances <= 0):
        raise ValidationError("a UAV cannot coincide with the UE", key="uav_positions", accepted="r > 0")
    is_los = np.array([s is LinkState.LOS for s in states])
    index = _select_serving(params, distances, is_los)
    state = states[index]
    r = float(distances[index])

    g = fading(state) if callable(fading) else float(fading)
    gain = params.intercept(state) * r ** (-params.exponent(state))
    snr = config.ptx * gain * config.gain * g / (config.nf * config.noise)
    return Realization(positions, states, index, state, r, snr, snr > config.gamma)


def simulate_one(params: ChannelParams, config: NetworkConfig, rng: np.random.Generator) -> Realization:
    """Draw one realization: PPP, LOS thinning, association and fading."""
    positions = generate_ppp(config.lambda_uav, config.aoi_radius, rng)
    if positions.shape[0] == 0:
        return evaluate_realization(params, config, positions, (), 0.0)
    distances = np.sqrt(np.sum(positions * positions, axis=1) + config.h * config.h)
    p_los = np.asarray(p_los_3d(params, config.h, distances))
    draws = rng.random(distances.size) < p_los
    states = tuple(LinkState.LOS if los else LinkState.NLOS for los in draws)
    return evaluate_realization(
        params, config, positions, states, lambda state: float(nakagami_sample(params.nakagami(state), rng))
    )


def nearest_distance(realization: Realization, state: LinkState, h: float) -> float:
    """3D distance to the closest UAV of `state` (inf when there is none)."""
    mask = np.array([s is state for s in realization.link_states], dtype=bool)
    if not mask.any():
        return math.inf
    xy = realization.uav_positions[mask]
    return float(np.sqrt(np.min(np.sum(xy * xy, axis=1)) + h * h))


# ============================================================================
# Estimation
# ============================================================================


def realization_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for realization `index`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(index,))))


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """
    Wilson score interval for a binomial proportion.

    Stays inside [0, 1] and keeps its width when the proportion sits at 0 or 1.
    """
    if n <= 0:
        raise ValidationError(f"need n >= 1 trials, got {n}", key="n", accepted=">= 1")
    if not 0 <= successes <= n:
        raise ValidationError(f"successes must lie in [0, {n}], got {successes}", key="successes")
    if not 0 < confidence < 1:
        raise ValidationError(f"confidence must lie in (0, 1), got {confidence}", key="confidence")

    z = float(norm.ppf(0.5 + confidence / 2.0))
    p_hat = successes / n
    z_sq = z * z
    denominator = 1.0 + z_sq / n
    center = (p_hat + z_sq / (2.0 * n)) / denominator
    margin = z * math.sqrt(p_hat * (1.0 - p_hat) / n + z_sq / (4.0 * n * n)) / denominator
    return max(0.0, min(center - margin, p_hat)), min(1.0, max(center + margin, p_hat))


# (covered, serving state or None, serving distance) per realization
_Outcome = tuple[bool, LinkState | None, float]


def _run_chunk(
    params: ChannelParams, config: NetworkConfig, master_seed: int, start: int, stop: int
) -> list[_Outcome]:
    outcomes: list[_Outcome] = []
    for k in range(start, stop):
        realization = simulate_one(params, config, realization_rng(master_seed, k))
        outcomes.append((realization.covered, realization.serving_state, realization.serving_distance))
    return outcomes


def _chunks(n: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(n / (workers * _CHUNKS_PER_WORKER)))
    return [(start, min(start + size, n)) for start in range(0, n, size)]


def estimate_coverage(
    params: ChannelParams,
    config: NetworkConfig,
    n_realizations: int,
    master_seed: int,
    workers: int = 1,
    confidence: float = 0.95,
    keep_distances: bool = False,
) -> McEstimate:
    """
    Covered fraction over `n_realizations` independent snapshots.

    The result depends only on (params, config, n_realizations, master_seed):
    chunks are reduced in realization order whatever `workers` is.
    """
    if isinstance(n_realizations, bool) or not isinstance(n_realizations, int) or n_realizations < 1:
        raise ValidationError(
            f"realization count must be an integer >= 1, got {n_realizations!r}",
            key="realizations",
            accepted="integer >= 1",
        )
    if isinstance(master_seed, bool) or not isinstance(master_seed, int) or master_seed < 0:
        raise ValidationError(f"seed must be a non-negative integer, got {master_seed!r}", key="seed", accepted=">= 0")
    config.validate()

    chunks = _chunks(n_realizations, max(1, workers))
    if workers <= 1 or len(chunks) == 1:
        parts = [_run_chunk(params, config, master_seed, start, stop) for start, stop in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, params, config, master_seed, start, stop) for start, stop in chunks]
            parts = [future.result() for future in futures]
    outcomes = [outcome for part in parts for outcome in part]

    covered = sum(1 for ok, _, _ in outcomes if ok)
    los_d = tuple(d for _, state, d in outcomes if state is LinkState.LOS)
    nlos_d = tuple(d for _, state, d in outcomes if state is LinkState.NLOS)
    empty = n_realizations - len(los_d) - len(nlos_d)
    low, high = wilson_interval(covered, n_realizations, confidence)

    estimate = McEstimate(
        p_hat=covered / n_realizations,
        ci_low=low,
        ci_high=high,
        n=n_realizations,
        seed=master_seed,
        serving_state_counts=(len(los_d), len(nlos_d), empty),
        confidence=confidence,
        los_distances=los_d if keep_distances else (),
        nlos_distances=nlos_d if keep_distances else (),
    )
    logger.debug(
        "MC h=%.6g lambda=%.6g/km^2: %d/%d covered (LOS %d, NLOS %d, empty %d)",
        config.h,
        config.lambda_per_km2,
        covered,
        n_realizations,
        len(los_d),
        len(nlos_d),
        empty,
    )
    return estimate
