"""Magnetization and correlations of layered 2D Ising models via orthogonal polynomials."""

__version__ = "0.1.0"

from .core import AngleSequence
from .errors import (
    ConditioningError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    IntegrabilityError,
    InvariantError,
    IsingError,
    NumericError,
    PreconditionError,
    SizeError,
)
