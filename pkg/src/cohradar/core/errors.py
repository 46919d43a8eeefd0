"""Error types and their CLI exit codes."""

from typing import Any, Optional


class CohRadarError(Exception):
    """Base class for all package errors."""

    exit_code: int = 1
    code: str = "error"

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details


class ScenarioError(CohRadarError):
    """Scenario file failed schema validation."""

    exit_code = 2
    code = "schema"


class PreconditionError(CohRadarError, ValueError):
    """An operation was called outside its preconditions."""

    exit_code = 3
    code = "precondition"


class DomainError(PreconditionError):
    """Argument outside the physical domain (time window, denominators)."""

    code = "domain"


class SweepIndexError(PreconditionError, IndexError):
    """Sweep point index out of range."""

    code = "index"


class NumericalError(CohRadarError, ArithmeticError):
    """A numerical procedure could not produce a result."""

    exit_code = 4
    code = "numerical"


class EstimationFailed(NumericalError):
    """The data carries no usable signal for the requested estimate."""

    code = "estimation_failed"
