"""Exception hierarchy shared by all heiscr modules."""

from __future__ import annotations


class HeisError(Exception):
    """Base class for every error raised by heiscr."""


class DimensionError(HeisError, ValueError):
    """Operands live in Heisenberg groups of different dimension."""


class DomainError(HeisError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(DomainError):
    """Evaluation hit the singular point of a map or formula."""


class ConvergenceError(HeisError, RuntimeError):
    """An iterative procedure did not reach its tolerance.

    ``residual`` carries the last residual and ``iterations`` the number of
    steps taken, so callers can report how far off the iteration was.
    """

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NoLimitError(HeisError, ValueError):
    """A field has no finite decay coefficient at infinity."""


class FieldSpecError(HeisError, ValueError):
    """A JSON field specification is malformed."""


class ConfigurationError(HeisError, ValueError):
    """A verification suite refers to unknown checks or bad settings."""


class BracketError(HeisError, ValueError):
    """A search window does not straddle the critical radius."""


class MonotonicityError(HeisError, RuntimeError):
    """The zero-violation predicate was not monotone in the radius."""


class EqualityError(HeisError, RuntimeError):
    """A classified family failed the Kelvin-equality check at its critical radius."""


class ParseError(HeisError, ValueError):
    """A command-line value could not be parsed."""
