"""Exception types shared across the package."""

from __future__ import annotations


class PlanError(Exception):
    """Base class for all errors raised by this package."""


class PlanValidationError(PlanError):
    """A plan failed validation where a valid plan was required.

    Carries the full violation list so callers can report every problem
    at once instead of fixing them one by one.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        summary = "; ".join(self.violations[:3])
        if len(self.violations) > 3:
            summary += f"; and {len(self.violations) - 3} more"
        super().__init__(f"invalid plan: {summary}")


class PlanSyntaxError(PlanError):
    """Text input does not conform to the plan grammar."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class PlanSchemaError(PlanError):
    """JSON input does not conform to the plan schema."""


class MappingError(PlanError):
    """A name-mapping table could not be loaded."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


class ConversionError(PlanError):
    """Dialect-specific input could not be converted."""


class CardinalityError(PlanError):
    """A cardinality value required by an analysis is unusable."""


class InconclusiveComparisonError(CardinalityError):
    """A cardinality comparison could not produce a verdict."""
