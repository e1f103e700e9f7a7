"""
Export Service

Writes result rows as CSV and renders the plain-text comparison report.

The CSV header is fixed; floats are written with repr() so every digit
survives, and absent Monte Carlo fields are empty strings.
"""

import csv
import io
import logging
from collections import defaultdict
from collections.abc import Sequence
from pathlib import Path

from core import config
from core.exceptions import ExportError
from services.sweep_service import ValidationSummary
from state.params import ResultRow

logger = logging.getLogger(__name__)

CSV_HEADER = (
    "gamma_db",
    "height_m",
    "lambda_per_km2",
    "n_uav",
    "n_ue",
    "pcov_analytic",
    "pcov_mc",
    "mc_ci_low",
    "mc_ci_high",
    "n_realizations",
    "seed",
)


def _cell(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _sort_key(row: ResultRow) -> tuple[float, float, float, int, int]:
    return (row.gamma_db, row.height_m, row.lambda_per_km2, row.n_uav, row.n_ue)


def format_csv(rows: Sequence[ResultRow]) -> str:
    """CSV text for `rows`, in grid order."""
    if not rows:
        raise ExportError("no result rows to export")
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in sorted(rows, key=_sort_key):
        writer.writerow([_cell(getattr(row, column)) for column in CSV_HEADER])
    return output.getvalue()


def emit_csv(rows: Sequence[ResultRow], path: str | Path | None = None) -> str:
    """
    Write rows to `path` (or return the text only when path is None).

    Raises:
        ExportError: no rows, or the path cannot be written
    """
    text = format_csv(rows)
    if path is not None:
        target = Path(path)
        try:
            target.write_text(text, encoding="utf-8")
        except OSError as e:
            raise ExportError(f"cannot write {target}: {e.strerror or e}") from e
        logger.info("Wrote %d rows to %s", len(rows), target)
    return text


# ============================================================================
# Report
# ============================================================================


def _antenna(row: ResultRow) -> str:
    return f"{row.n_uav}x{row.n_ue}"


def _altitude_section(rows: Sequence[ResultRow]) -> list[str]:
    groups: dict[tuple[float, float, int, int], list[ResultRow]] = defaultdict(list)
    for row in rows:
        if row.pcov_analytic is not None:
            groups[row.group_key].append(row)

    lines: list[str] = []
    for key in sorted(groups):
        curve = groups[key]
        if len(curve) < 2:
            continue
        # First maximum in altitude order, i.e. ties go to the lower altitude
        best = max(sorted(curve, key=lambda r: r.height_m), key=lambda r: r.pcov_analytic or 0.0)
        lines.append(
            f"gamma = {best.gamma_db:g} dB, lambda = {best.lambda_per_km2:g}/km^2, "
            f"antenna {_antenna(best)} ({len(curve)} heights): "
            f"h_opt = {best.height_m:g} m, peak P_cov = {best.pcov_analytic:.4f}"
        )
    return lines


def _density_section(rows: Sequence[ResultRow]) -> list[str]:
    groups: dict[tuple[float, float, int, int], list[ResultRow]] = defaultdict(list)
    for row in rows:
        if row.pcov_analytic is not None:
            groups[(row.gamma_db, row.height_m, row.n_uav, row.n_ue)].append(row)

    lines: list[str] = []
    for key in sorted(groups):
        series = sorted(groups[key], key=lambda r: r.lambda_per_km2)
        if len(series) < 2:
            continue
        first = series[0]
        values = ", ".join(f"{r.lambda_per_km2:g} -> {r.pcov_analytic:.4f}" for r in series)
        lines.append(f"gamma = {first.gamma_db:g} dB, h = {first.height_m:g} m, antenna {_antenna(first)}: {values}")
    return lines


def _validation_section(rows: Sequence[ResultRow], summary: ValidationSummary | None) -> list[str]:
    lines = [
        f"{'gamma_db':>9} {'height_m':>9} {'lambda':>7} {'antenna':>8} {'analytic':>9} {'mc':>7} "
        f"{'ci_low':>7} {'ci_high':>7}  flag"
    ]
    for row in rows:
        if not row.has_mc:
            continue
        analytic = "failed" if row.pcov_analytic is None else f"{row.pcov_analytic:.4f}"
        lines.append(
            f"{row.gamma_db:>9g} {row.height_m:>9g} {row.lambda_per_km2:>7g} {_antenna(row):>8} "
            f"{analytic:>9} {row.pcov_mc:>7.4f} {row.mc_ci_low:>7.4f} {row.mc_ci_high:>7.4f}"
            f"  {'*' if row.flagged else ''}"
        )
    if summary is not None:
        lines.append(
            f"{summary.n_flagged} of {summary.n_rows} rows flagged "
            f"({100 * summary.flagged_fraction:.1f}%, bound {100 * summary.bound:.1f}%, "
            f"{100 * summary.confidence:g}% Wilson intervals); exit status {summary.exit_status}"
        )
    return lines


def emit_report(rows: Sequence[ResultRow], summary: ValidationSummary | None = None) -> str:
    """Human-readable summary: optimal altitude per curve, density series, MC agreement."""
    if not rows:
        raise ExportError("no result rows to report")
    ordered = sorted(rows, key=_sort_key)
    lines = [f"uavcov {config.APP_VERSION}: {len(ordered)} grid points"]

    altitude = _altitude_section(ordered)
    if altitude:
        lines += ["", "Optimal altitude per curve", *altitude]

    density = _density_section(ordered)
    if density:
        lines += ["", "Coverage vs UAV density (per km^2)", *density]

    if len(ordered) == 1 and ordered[0].pcov_analytic is not None:
        row = ordered[0]
        lines += [
            "",
            f"P_cov = {row.pcov_analytic:.6f} at h = {row.height_m:g} m, lambda = {row.lambda_per_km2:g}/km^2, "
            f"gamma = {row.gamma_db:g} dB, antenna {_antenna(row)}",
        ]

    if any(row.has_mc for row in ordered):
        lines += ["", "Monte Carlo agreement", *_validation_section(ordered, summary)]

    failed = [row for row in ordered if row.error]
    if failed:
        lines += ["", f"{len(failed)} point(s) failed:"]
        lines += [
            f"  gamma = {r.gamma_db:g} dB, h = {r.height_m:g} m, lambda = {r.lambda_per_km2:g}: {r.error}"
            for r in failed
        ]
    return "\n".join(lines) + "\n"
