"""
Logging Configuration

Console logging for every run, plus a log file when LOG_DIR is set (batch
sweeps on shared machines).
"""

import logging
from pathlib import Path

from . import config


def configure_logging(
    log_level: int | str | None = None,
    log_format: str = "%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    log_dir: str | None = None,
) -> logging.Logger:
    """
    Configure root logging once per process.

    Args:
        log_level: Logging level name or number (default: LOG_LEVEL env, INFO)
        log_format: Log message format
        log_dir: Directory for uavcov.log (default: LOG_DIR env, no file)

    Returns:
        Configured logger instance
    """
    level = log_level if log_level is not None else config.LOG_LEVEL
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    handlers: list[logging.Handler] = [logging.StreamHandler()]

    directory = log_dir or config.LOG_DIR
    if directory:
        log_file = Path(directory) / "uavcov.log"
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(str(log_file), encoding="utf-8"))

    logging.basicConfig(level=level, format=log_format, handlers=handlers, force=True)

    return logging.getLogger("uavcov")


def get_logger(name: str | None = None) -> logging.Logger:
    """
    Get a logger instance.

    Args:
        name: Logger name (default: the package logger)

    Returns:
        Logger instance
    """
    return logging.getLogger(name or "uavcov")
