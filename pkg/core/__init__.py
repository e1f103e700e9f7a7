# Core infrastructure module
from . import config
from .exceptions import (
    ConfigurationError,
    ExportError,
    NumericalError,
    QuadratureError,
    UavCoverageError,
    UsageError,
    ValidationError,
)
from .logging_config import configure_logging, get_logger

__all__ = [
    "ConfigurationError",
    "ExportError",
    "NumericalError",
    "QuadratureError",
    "UavCoverageError",
    "UsageError",
    "ValidationError",
    "config",
    "configure_logging",
    "get_logger",
]
