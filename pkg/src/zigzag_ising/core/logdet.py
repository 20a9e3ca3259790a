"""Determinants kept as (sign, log|det|) pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor

from ..errors import SizeError


@dataclass(frozen=True)
class LogDet:
    sign: float
    log_abs: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def __mul__(self, other: "LogDet") -> "LogDet":
        return LogDet(self.sign * other.sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogDet") -> "LogDet":
        if other.sign == 0:
            raise ZeroDivisionError("division by a singular determinant")
        return LogDet(self.sign * other.sign, self.log_abs - other.log_abs)

    def power(self, p: float) -> "LogDet":
        if self.sign < 0 and p != int(p):
            raise ValueError("non-integer power of a negative determinant")
        sign = self.sign ** int(p) if p == int(p) else self.sign
        return LogDet(sign, p * self.log_abs)

    @classmethod
    def of(cls, x: float) -> "LogDet":
        if x == 0:
            return SINGULAR
        return cls(math.copysign(1.0, x), math.log(abs(x)))


SINGULAR = LogDet(0.0, -math.inf)
ONE = LogDet(1.0, 0.0)


def logdet(A) -> LogDet:
    """Determinant via partially pivoted LU, accumulating log|pivot|.

    Returns :data:`SINGULAR` when a pivot is below ``n * eps * max|A|``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SizeError(f"square matrix required, got shape {A.shape}")
    n = A.shape[0]
    if n == 0:
        return ONE
    scale = np.max(np.abs(A))
    if scale == 0.0 or not np.isfinite(scale):
        return SINGULAR
    lu, piv = lu_factor(A, check_finite=False)
    pivots = np.diag(lu)
    if np.min(np.abs(pivots)) <= n * np.finfo(float).eps * scale:
        return SINGULAR
    swaps = np.count_nonzero(piv != np.arange(n))
    sign = (-1.0) ** swaps * np.prod(np.sign(pivots))
    return LogDet(float(sign), float(np.sum(np.log(np.abs(pivots)))))


def hankel_matrix(mu, m: int, offset: int = 0) -> np.ndarray:
    mu = np.asarray(getattr(mu, "values", mu), dtype=float)
    if mu.size < offset + 2 * m - 1:
        raise SizeError(f"Hankel order {m} (offset {offset}) needs moments up to {offset + 2 * m - 2}")
    idx = np.add.outer(np.arange(m), np.arange(m)) + offset
    return mu[idx]


def hankel_logdet(mu, m: int, offset: int = 0) -> LogDet:
    """log-det of [mu_{p+q+offset}]_{p,q<m}; ``mu`` is a MomentTable or array."""
    if m == 0:
        return ONE
    return logdet(hankel_matrix(mu, m, offset))
