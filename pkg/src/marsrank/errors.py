"""Exception hierarchy.

Everything a user can trigger with bad input derives from ``ValidationError``
so the CLI can map it to exit code 2 in one place.
"""


class MarsRankError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(MarsRankError, ValueError):
    """Input rejected before any statistics were computed."""


class MalformedInput(ValidationError):
    pass


class TooFewMethods(ValidationError):
    pass


class EmptyMatrix(ValidationError):
    pass


class NonFiniteValue(ValidationError):
    pass


class DomainError(ValidationError):
    """Argument outside the mathematical domain of a function."""


class UnsupportedK(ValidationError):
    pass


class UnsupportedAlpha(ValidationError):
    pass


class DegenerateInput(ValidationError):
    pass


class UnknownScenario(ValidationError):
    pass


class MissingMode(ValidationError):
    """A report does not contain the section a command asked for."""


class InvariantViolation(MarsRankError, AssertionError):
    """Internal consistency check failed; indicates a bug, not bad input."""
