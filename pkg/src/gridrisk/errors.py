"""Exception hierarchy shared across the package."""


class GridRiskError(Exception):
    """Base class for all package errors."""


class CaseParseError(GridRiskError):
    """Raised when a case file cannot be parsed; carries the offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(GridRiskError):
    """Raised when grid or configuration data violates an invariant."""


class SolverError(GridRiskError):
    """Raised when the LP solver cannot produce a trustworthy solution."""


class ConfigError(GridRiskError):
    """Raised for malformed or inconsistent run configuration."""


class TrainingError(GridRiskError):
    """Raised when surrogate training cannot continue (bad data, divergence)."""
