"""
Tests for process-level configuration.

Tests cover:
- Worker count resolution
- Version lookup
- Logging setup
"""

import logging
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from core import config
from core.logging_config import configure_logging, get_logger


class TestResolveWorkers:
    """--workers values."""

    def test_explicit_count(self) -> None:
        assert config.resolve_workers(3) == 3
        assert config.resolve_workers("2") == 2

    @pytest.mark.parametrize("value", ["auto", "AUTO", 0, -1])
    def test_one_per_cpu(self, value: int | str, mocker: MockerFixture) -> None:
        mocker.patch("core.config.os.cpu_count", return_value=6)
        assert config.resolve_workers(value) == 6

    def test_unknown_cpu_count(self, mocker: MockerFixture) -> None:
        mocker.patch("core.config.os.cpu_count", return_value=None)
        assert config.resolve_workers("auto") == 1

    def test_default(self, mocker: MockerFixture) -> None:
        mocker.patch.object(config, "DEFAULT_WORKERS", 4)
        assert config.resolve_workers(None) == 4

    def test_not_a_number(self) -> None:
        with pytest.raises(ValueError):
            config.resolve_workers("many")


class TestEnvironmentDefaults:
    """Numeric defaults read from the environment."""

    def test_flagged_fraction_parsed(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("UAVCOV_MAX_FLAGGED_FRACTION", "0.1")
        assert config._env_float("UAVCOV_MAX_FLAGGED_FRACTION", 0.05) == 0.1

    @pytest.mark.parametrize("raw", ["", "lots"])
    def test_flagged_fraction_fallback(self, raw: str, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("UAVCOV_MAX_FLAGGED_FRACTION", raw)
        assert config._env_float("UAVCOV_MAX_FLAGGED_FRACTION", 0.05) == 0.05


class TestVersion:
    """APP_VERSION lookup."""

    def test_env_wins(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("APP_VERSION", "9.9.9")
        assert config._get_version() == "9.9.9"

    def test_version_file(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv("APP_VERSION", raising=False)
        expected = (config.PROJECT_ROOT / "version.txt").read_text().strip()
        assert config._get_version() == expected

    def test_fallback(self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
        monkeypatch.delenv("APP_VERSION", raising=False)
        monkeypatch.setattr(config, "PROJECT_ROOT", tmp_path)
        assert config._get_version() == "dev"


class TestLogging:
    """configure_logging."""

    def test_log_file(self, tmp_path: Path) -> None:
        logger = configure_logging(log_level="DEBUG", log_dir=str(tmp_path / "logs"))
        logger.info("sweep started")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "sweep started" in (tmp_path / "logs" / "uavcov.log").read_text(encoding="utf-8")
        assert logging.getLogger().level == logging.DEBUG
        configure_logging(log_level="INFO", log_dir="")

    def test_unknown_level_falls_back(self) -> None:
        configure_logging(log_level="CHATTY", log_dir="")
        assert logging.getLogger().level == logging.INFO

    def test_package_logger(self) -> None:
        assert get_logger().name == "uavcov"
        assert get_logger("uavcov.cli").name == "uavcov.cli"
