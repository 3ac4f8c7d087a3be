"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class SingleRingError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(SingleRingError, ValueError):
    """Bad input: malformed measure, config, or violated precondition."""

    exit_code = 2


class DomainError(ValidationError):
    """An argument lies outside the domain of the requested transform."""


class PoleError(DomainError):
    """Evaluation point coincides with an atom (pole of the transform)."""


class NoGapError(ValidationError):
    """The moment condition needed for a support-gap certificate fails."""


class ConvergenceError(SingleRingError, ArithmeticError):
    """An iterative solver did not reach its tolerance."""

    exit_code = 3


class ConsistencyError(SingleRingError, AssertionError):
    """An internal numeric self-check failed."""

    exit_code = 3
