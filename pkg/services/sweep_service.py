"""
Sweep Service

Orchestrates the three workloads:
1. analyze  - analytic coverage at one network point
2. sweep    - analytic coverage over a Cartesian grid
3. validate - sweep plus a Monte Carlo estimate per point, flagging rows where
              the analytic value falls outside the MC interval

Grid points run on a process pool and come back in grid order. A numerical
failure at one point is recorded on its row and does not stop the sweep.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from core import config
from core.exceptions import NumericalError
from services.analytic import coverage_probability
from services.montecarlo import estimate_coverage
from state.config_manager import ScenarioConfig
from state.params import ResultRow, SweepPoint, SweepSpec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BOUND_EXCEEDED = 1


@dataclass(frozen=True)
class ValidationSummary:
    """Outcome of a validate run."""

    n_rows: int
    n_flagged: int
    n_failed: int
    bound: float
    confidence: float

    @property
    def flagged_fraction(self) -> float:
        return self.n_flagged / self.n_rows if self.n_rows else 0.0

    @property
    def exit_status(self) -> int:
        return validation_exit_status(self.flagged_fraction, self.bound)


def validation_exit_status(flagged_fraction: float, bound: float) -> int:
    """1 when the flagged fraction exceeds the bound, else 0."""
    return EXIT_BOUND_EXCEEDED if flagged_fraction > bound else EXIT_OK


@dataclass(frozen=True)
class _Job:
    scenario: ScenarioConfig
    point: SweepPoint
    n_realizations: int | None = None
    seed: int | None = None


def _evaluate(job: _Job) -> ResultRow:
    """One grid point; top-level so the process pool can pickle it."""
    scenario, point = job.scenario, job.point
    network = scenario.network.with_point(
        height_m=point.height_m,
        lambda_per_km2=point.lambda_per_km2,
        gamma_db=point.gamma_db,
        antenna=point.antenna,
    )
    row = ResultRow(
        gamma_db=point.gamma_db,
        height_m=point.height_m,
        lambda_per_km2=point.lambda_per_km2,
        n_uav=point.n_uav,
        n_ue=point.n_ue,
        pcov_analytic=None,
    )
    try:
        row.pcov_analytic = coverage_probability(scenario.channel, network, scenario.quadrature)
    except NumericalError as e:
        row.error = e.user_message
        logger.warning("[SWEEP] h=%g lambda=%g gamma=%g dB failed: %s", point.height_m,
                       point.lambda_per_km2, point.gamma_db, e.user_message)

    if job.n_realizations is not None and job.seed is not None:
        estimate = estimate_coverage(
            scenario.channel,
            network,
            job.n_realizations,
            job.seed,
            workers=1,
            confidence=scenario.validation.confidence,
        )
        row.pcov_mc = estimate.p_hat
        row.mc_ci_low = estimate.ci_low
        row.mc_ci_high = estimate.ci_high
        row.n_realizations = estimate.n
        row.seed = estimate.seed
        row.flagged = row.pcov_analytic is None or not estimate.contains(row.pcov_analytic)
    return row


class SweepService:
    """Runs analyze/sweep/validate workloads for one scenario."""

    def __init__(self, scenario: ScenarioConfig, workers: int | str | None = None):
        self.scenario = scenario
        self.workers = config.resolve_workers(workers)

    def _run(self, jobs: list[_Job]) -> list[ResultRow]:
        if self.workers <= 1 or len(jobs) <= 1:
            return [_evaluate(job) for job in jobs]
        with ProcessPoolExecutor(max_workers=min(self.workers, len(jobs))) as pool:
            # map() yields in submission order, i.e. grid order
            return list(pool.map(_evaluate, jobs))

    def _grid(self, spec: SweepSpec | None) -> SweepSpec:
        spec = (self.scenario.sweep if spec is None else spec).validate()
        # Checked up front so no point fails on a fixed r_max after others ran
        self.scenario.quadrature.validate(h=max(spec.heights))
        return spec

    def analyze(self) -> ResultRow:
        """Analytic coverage at the scenario's network point. Numerical failures propagate."""
        network = self.scenario.network
        point = SweepPoint(
            gamma_db=round(network.gamma_db, 10) + 0.0,
            height_m=network.h,
            lambda_per_km2=round(network.lambda_per_km2, 9),
            n_uav=network.n_uav,
            n_ue=network.n_ue,
        )
        pcov = coverage_probability(self.scenario.channel, network, self.scenario.quadrature)
        logger.info("[ANALYZE] h=%g m lambda=%g/km^2 gamma=%g dB: P_cov=%.6f",
                    point.height_m, point.lambda_per_km2, point.gamma_db, pcov)
        return ResultRow(point.gamma_db, point.height_m, point.lambda_per_km2, point.n_uav, point.n_ue, pcov)

    def sweep(self, spec: SweepSpec | None = None) -> list[ResultRow]:
        spec = self._grid(spec)
        logger.info("[SWEEP] Evaluating %d grid points on %d worker(s)", len(spec), self.workers)
        rows = self._run([_Job(self.scenario, point) for point in spec.points()])
        failed = sum(1 for row in rows if row.error)
        if failed:
            logger.warning("[SWEEP] %d of %d points failed to integrate", failed, len(rows))
        logger.info("[SWEEP] Done: %d rows", len(rows))
        return rows

    def validate(
        self, n_realizations: int, seed: int, spec: SweepSpec | None = None
    ) -> tuple[list[ResultRow], ValidationSummary]:
        spec = self._grid(spec)
        logger.info("[VALIDATE] %d grid points x %d realizations (seed %d)", len(spec), n_realizations, seed)
        rows = self._run([_Job(self.scenario, point, n_realizations, seed) for point in spec.points()])
        summary = ValidationSummary(
            n_rows=len(rows),
            n_flagged=sum(1 for row in rows if row.flagged),
            n_failed=sum(1 for row in rows if row.error),
            bound=self.scenario.validation.max_flagged_fraction,
            confidence=self.scenario.validation.confidence,
        )
        logger.info("[VALIDATE] %d of %d rows flagged (%.1f%%, bound %.1f%%)", summary.n_flagged,
                    summary.n_rows, 100 * summary.flagged_fraction, 100 * summary.bound)
        return rows, summary


def run_analyze(scenario: ScenarioConfig) -> ResultRow:
    return SweepService(scenario, workers=1).analyze()


def run_sweep(scenario: ScenarioConfig, spec: SweepSpec | None = None, workers: int | str | None = 1) -> list[ResultRow]:
    return SweepService(scenario, workers).sweep(spec)


def run_validate(
    scenario: ScenarioConfig,
    n_realizations: int,
    seed: int,
    spec: SweepSpec | None = None,
    workers: int | str | None = 1,
) -> tuple[list[ResultRow], ValidationSummary]:
    return SweepService(scenario, workers).validate(n_realizations, seed, spec)
