from __future__ import annotations


class PlannerError(Exception):
    """Base exception for domain-level planning errors."""

    def __init__(self, message: str, constraint: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.constraint = constraint


class UndefinedGeometryError(PlannerError):
    """Raised when a channel formula is evaluated at zero distance."""

    def __init__(self, message: str) -> None:
        super().__init__(message, constraint="geometry")


class InvalidParameterError(PlannerError):
    """Raised when a parameter set violates its invariants."""


class StructuralError(PlannerError):
    """Raised on shape, count or arithmetic mismatches between inputs."""


class InfeasibleError(PlannerError):
    """Raised when a feasible set is empty."""


class SeparationInfeasibleError(InfeasibleError):
    """Raised when no start-slot combination honours the protect distance."""

    def __init__(self, message: str) -> None:
        super().__init__(message, constraint="separation")


class InstanceTooLargeError(PlannerError):
    """Raised when an exhaustive search is asked to enumerate too much."""


class PlanValidationError(PlannerError):
    """Raised when a plan fails validation before it is emitted."""

    def __init__(self, message: str, violations: list[str] | None = None) -> None:
        super().__init__(message, constraint="validation")
        self.violations = list(violations or [])


class ConfigParseError(PlannerError):
    """Raised when an experiment config file cannot be parsed."""

    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        location: str | None = None,
    ) -> None:
        super().__init__(message, constraint="config")
        self.line = line
        self.column = column
        self.location = location
