"""Exception hierarchy.

Validation problems derive from ``ValidationError`` and numerical breakdowns
from ``NumericalError``; the CLI maps these to exit codes 2 and 3.
"""


class AiepError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AiepError, ValueError):
    pass


class NumericalError(AiepError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class BadLength(ValidationError):
    pass


class InvalidDimension(ValidationError):
    pass


class InvalidEpsilon(ValidationError):
    pass


class NonPositiveInput(ValidationError):
    pass


class ConfigError(ValidationError):
    """Experiment-file problem; carries the offending section/field and line."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class NotPositiveDefinite(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class ObjectiveNonFinite(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass
