"""
Centralized runtime configuration for uavcov.

Scenario parameters (channel and network constants) live in the YAML
config file; this module only holds the process-level defaults that the CLI and
the engines fall back to. Values come from the environment, optionally seeded
from a `.env` file.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

PROJECT_ROOT = Path(__file__).parent.parent


def _get_version() -> str:
    """
    Get the application version.

    Priority:
    1. APP_VERSION env var
    2. version.txt in the project root
    3. Fallback to "dev"
    """
    env_version = os.environ.get("APP_VERSION")
    if env_version:
        return env_version

    version_file = PROJECT_ROOT / "version.txt"
    try:
        if version_file.exists():
            return version_file.read_text().strip()
    except OSError:
        pass

    return "dev"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError:
        return default


# ============================================================================
# SCENARIO FILE
# ============================================================================

# Shipped urban mmWave defaults
DEFAULT_CONFIG_PATH = Path(
    os.environ.get("UAVCOV_CONFIG", str(PROJECT_ROOT / "config" / "uavcov.yaml"))
)


# ============================================================================
# MONTE CARLO DEFAULTS
# ============================================================================

# Realizations per grid point
DEFAULT_REALIZATIONS = _env_int("UAVCOV_REALIZATIONS", 1000)

# Master seed for the per-realization substreams
DEFAULT_SEED = _env_int("UAVCOV_SEED", 0)

# Worker processes for sweeps and MC batches; 0 means "one per CPU"
DEFAULT_WORKERS = _env_int("UAVCOV_WORKERS", 1)

# validate exits non-zero when more than this fraction of rows is flagged
DEFAULT_MAX_FLAGGED_FRACTION = _env_float("UAVCOV_MAX_FLAGGED_FRACTION", 0.05)


# ============================================================================
# LOGGING
# ============================================================================

LOG_DIR = os.environ.get("LOG_DIR")
LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO").upper()


# ============================================================================
# VERSIONING
# ============================================================================

APP_VERSION = _get_version()


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================


def resolve_workers(requested: int | str | None) -> int:
    """
    Turn a `--workers` value into a process count.

    Accepts an integer, a numeric string, "auto" (one per CPU) or None (the
    environment default). Always returns at least 1.
    """
    if requested is None:
        requested = DEFAULT_WORKERS
    if isinstance(requested, str):
        if requested.strip().lower() == "auto":
            return max(1, os.cpu_count() or 1)
        requested = int(requested)
    if requested <= 0:
        return max(1, os.cpu_count() or 1)
    return requested
