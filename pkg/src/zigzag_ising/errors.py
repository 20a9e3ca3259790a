"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each family is kept distinct:
domain problems (bad input), numerical trouble (non-convergence,
conditioning) and cross-engine consistency failures.
"""

from __future__ import annotations


class IsingError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(IsingError, ValueError):
    """Input outside the mathematical domain of an operation."""


class SizeError(DomainError):
    """A truncation, table or lattice is too small (or too large) for the request."""


class PreconditionError(DomainError):
    """A structural precondition (criticality, parity, ...) does not hold."""


class IntegrabilityError(DomainError):
    """A weight is not integrable at the requested parameters."""


class NumericError(IsingError, ArithmeticError):
    """Numerical failure: eigensolver breakdown, quadrature non-convergence."""


class ConditioningError(NumericError):
    """A recursion or factorization lost all significant digits."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class InvariantError(NumericError):
    """A computed object violates an invariant it must satisfy by construction."""


class ConvergenceError(NumericError):
    """Adaptive refinement hit its ceiling without meeting the tolerance.

    ``iterates`` holds the last two ``(N, value)`` pairs.
    """

    def __init__(self, message: str, iterates: tuple = ()):
        super().__init__(message)
        self.iterates = tuple(iterates)


class ConsistencyError(IsingError):
    """Two independent computation paths disagree beyond tolerance."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
