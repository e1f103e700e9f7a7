"""
Custom Exception Hierarchy

Provides specific exception types for the failure modes of the coverage
engines, so the CLI can map each one onto a stable exit status.
"""


class UavCoverageError(Exception):
    """Base exception for all coverage-engine errors."""

    code: str = "UNKNOWN_ERROR"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code:
            self.code = code

    @property
    def user_message(self) -> str:
        """Message suitable for printing on the command line."""
        return str(self.args[0]) if self.args else "An error occurred."


class ValidationError(UavCoverageError):
    """Raised when a parameter falls outside its accepted range.

    `key` names the offending parameter (a dotted config path when the value
    came from a file) and `accepted` describes the range that would pass.
    """

    code = "VALIDATION_ERROR"

    def __init__(self, message: str, key: str | None = None, accepted: str | None = None):
        super().__init__(message)
        self.key = key
        self.accepted = accepted


class ConfigurationError(UavCoverageError):
    """Raised when a configuration file is unreadable, incomplete or malformed."""

    code = "CONFIG_ERROR"

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class UsageError(UavCoverageError):
    """Raised when command-line arguments cannot describe a runnable workload."""

    code = "USAGE_ERROR"


class NumericalError(UavCoverageError):
    """Raised when a numerical routine cannot reach the requested accuracy."""

    code = "NUMERICAL_ERROR"


class QuadratureError(NumericalError):
    """Raised when an integral does not converge.

    `integral` identifies the sub-integral (e.g. "association_probability[LOS]")
    so sweep rows and logs point at the exact failing term.
    """

    code = "QUADRATURE_FAILED"

    def __init__(self, message: str, integral: str | None = None):
        super().__init__(message)
        self.integral = integral


class ExportError(UavCoverageError):
    """Raised when results cannot be written."""

    code = "EXPORT_FAILED"
