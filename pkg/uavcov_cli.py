#!/usr/bin/env python3
"""
uavcov CLI

Coverage probability of a mmWave UAV downlink: analytic values at one point or
over a grid, optionally cross-checked against Monte Carlo.

Usage:
  uavcov analyze  [--config PATH] [--height M] [--lambda PER_KM2] [--gamma-db DB] [--antenna NxM]
  uavcov sweep    [--config PATH] [filters] [--output CSV] [--workers N|auto] [--tol ABS]
  uavcov validate [--config PATH] [filters] [--realizations N] [--seed S] [--output CSV]
  uavcov --write-default-config PATH

Exit codes:
  0 - Success
  1 - validate: flagged fraction above the configured bound
  2 - Usage or configuration error
  3 - Numerical failure
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from core import config
from core.exceptions import (
    ConfigurationError,
    ExportError,
    NumericalError,
    UsageError,
    ValidationError,
)
from core.logging_config import configure_logging, get_logger
from services.export_service import emit_csv, emit_report
from services.sweep_service import SweepService
from state.config_manager import ScenarioConfig, default_scenario, load_config, save_config
from state.params import SweepSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

logger = get_logger("uavcov.cli")


def _antenna(value: str) -> tuple[int, int]:
    try:
        n_uav, n_ue = (int(part) for part in value.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NUAVxNUE (e.g. 8x8), got {value!r}") from None
    if n_uav < 1 or n_ue < 1:
        raise argparse.ArgumentTypeError(f"antenna counts must be >= 1, got {value!r}")
    return n_uav, n_ue


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavcov",
        description="Downlink coverage probability of mmWave UAV networks.",
    )
    parser.add_argument("command", nargs="?", choices=("analyze", "sweep", "validate"))
    parser.add_argument("--config", type=Path, default=config.DEFAULT_CONFIG_PATH, help="scenario YAML file")
    parser.add_argument("--realizations", type=int, default=config.DEFAULT_REALIZATIONS,
                        help="Monte Carlo realizations per point (validate)")
    parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED, help="master seed (validate)")
    parser.add_argument("--output", type=Path, help="CSV output path (default: stdout)")
    parser.add_argument("--workers", default=str(config.DEFAULT_WORKERS), help="worker processes, or 'auto'")
    parser.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    parser.add_argument("--height", type=float, action="append", help="restrict to altitude(s) in m")
    parser.add_argument("--lambda", dest="density", type=float, action="append",
                        help="restrict to UAV density(ies) per km^2")
    parser.add_argument("--gamma-db", type=float, action="append", help="restrict to SNR threshold(s) in dB")
    parser.add_argument("--antenna", type=_antenna, action="append", help="restrict to NUAVxNUE array(s)")
    parser.add_argument("--write-default-config", type=Path, metavar="PATH",
                        help="write the shipped default scenario and exit")
    parser.add_argument("--log-level", default=None, help="logging level (default: LOG_LEVEL env or INFO)")
    return parser


def _apply_tolerance(scenario: ScenarioConfig, tol: float | None) -> ScenarioConfig:
    if tol is None:
        return scenario
    if not tol > 0:
        raise UsageError(f"--tol must be > 0, got {tol}")
    return scenario._replace(quadrature=replace(scenario.quadrature, abs_tol=tol).validate(h=scenario.network.h))


def _single(values: list | None, flag: str) -> object | None:
    if not values:
        return None
    if len(values) > 1:
        raise UsageError(f"analyze takes a single {flag} value")
    return values[0]


def _analyze_scenario(scenario: ScenarioConfig, args: argparse.Namespace) -> ScenarioConfig:
    network = scenario.network.with_point(
        height_m=_single(args.height, "--height"),  # type: ignore[arg-type]
        lambda_per_km2=_single(args.density, "--lambda"),  # type: ignore[arg-type]
        gamma_db=_single(args.gamma_db, "--gamma-db"),  # type: ignore[arg-type]
        antenna=_single(args.antenna, "--antenna"),  # type: ignore[arg-type]
    )
    return scenario._replace(network=network)


def _restricted_grid(scenario: ScenarioConfig, args: argparse.Namespace) -> SweepSpec:
    spec = scenario.sweep.restrict(
        heights=args.height,
        densities=args.density,
        thresholds_db=args.gamma_db,
        antenna_configs=args.antenna,
    )
    empty = [
        flag
        for flag, axis in (
            ("--height", spec.heights),
            ("--lambda", spec.densities),
            ("--gamma-db", spec.thresholds_db),
            ("--antenna", spec.antenna_configs),
        )
        if not axis
    ]
    if empty:
        raise UsageError(f"{', '.join(empty)} selects nothing from the configured sweep grid")
    return spec


def _write(rows: list, report: str, output: Path | None) -> None:
    # CSV owns stdout unless it goes to a file
    if output is not None:
        emit_csv(rows, output)
        sys.stdout.write(report)
    else:
        sys.stdout.write(emit_csv(rows))
        sys.stderr.write(report)


def run(args: argparse.Namespace) -> int:
    """Execute one parsed invocation and return its exit code."""
    if args.write_default_config is not None:
        path = save_config(default_scenario(), args.write_default_config)
        logger.info("Default scenario written to %s", path)
        return EXIT_OK
    if args.command is None:
        raise UsageError("a command is required: analyze, sweep or validate")
    if args.realizations < 1:
        raise UsageError(f"--realizations must be >= 1, got {args.realizations}")
    if args.seed < 0:
        raise UsageError(f"--seed must be >= 0, got {args.seed}")
    try:
        workers = config.resolve_workers(args.workers)
    except ValueError:
        raise UsageError(f"--workers must be an integer or 'auto', got {args.workers!r}") from None

    scenario = _apply_tolerance(load_config(args.config), args.tol)

    if args.command == "analyze":
        scenario = _analyze_scenario(scenario, args)
        rows = [SweepService(scenario, workers).analyze()]
        summary = None
    else:
        spec = _restricted_grid(scenario, args)
        service = SweepService(scenario, workers)
        if args.command == "sweep":
            rows = service.sweep(spec)
            summary = None
        else:
            rows, summary = service.validate(args.realizations, args.seed, spec)

    _write(rows, emit_report(rows, summary), args.output)

    if summary is not None:
        return summary.exit_status
    if any(row.error for row in rows):
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    configure_logging(log_level=args.log_level)
    logger.info("uavcov %s starting (%s)", config.APP_VERSION, args.command or "write-default-config")

    try:
        exit_code = run(args)
    except (ValidationError, ConfigurationError, UsageError) as e:
        logger.error("%s: %s", e.code, e.user_message)
        exit_code = EXIT_USAGE
    except ExportError as e:
        logger.error("%s: %s", e.code, e.user_message)
        exit_code = EXIT_USAGE
    except NumericalError as e:
        logger.error("%s: %s", e.code, e.user_message)
        exit_code = EXIT_NUMERICAL
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        exit_code = 130

    logger.info("Exiting with code %d", exit_code)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
