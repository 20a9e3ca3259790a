"""Tridiagonal Jacobi operator J = D D^T of the even block and its moments.

Sign conventions: the off-diagonal of J is stored as +a_k and the bidiagonal
factor D is real.  Conjugating by diag(+-1) (and dropping a scalar phase)
maps these onto the signed operators of the theory without changing moments,
spectra or absolute values of minors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InvariantError, SizeError
from .angles import AngleSequence

SPECTRUM_SLACK = 1e-10


@dataclass(frozen=True)
class JacobiOperator:
    """Symmetric tridiagonal truncation with ``diag`` b_1..b_N and ``offdiag`` a_1..a_{N-1}."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.diag, dtype=float)
        a = np.asarray(self.offdiag, dtype=float)
        if b.ndim != 1 or b.size < 1:
            raise SizeError("Jacobi operator needs at least one diagonal entry")
        if a.shape != (b.size - 1,):
            raise SizeError(f"offdiag must have length {b.size - 1}, got {a.shape}")
        if np.any(a <= 0.0):
            raise InvariantError("Jacobi off-diagonal entries must be positive")
        b.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "diag", b)
        object.__setattr__(self, "offdiag", a)

    @property
    def size(self) -> int:
        return self.diag.size

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def leading(self, n: int) -> "JacobiOperator":
        if not 1 <= n <= self.size:
            raise SizeError(f"cannot take a {n}x{n} block of a size-{self.size} operator")
        return JacobiOperator(self.diag[:n], self.offdiag[: n - 1])


@dataclass(frozen=True)
class BidiagonalOperator:
    """Lower bidiagonal D with diagonal d_1..d_N and subdiagonal s_1..s_{N-1}.

    ``tail`` keeps s_N, the coupling to the first row beyond the truncation.
    It does not enter D itself but lets :meth:`jacobi` reproduce the
    diagonal of a larger truncation exactly.
    """

    diag: np.ndarray
    sub: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        s = np.asarray(self.sub, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise SizeError("bidiagonal operator needs at least one diagonal entry")
        if s.shape != (d.size - 1,):
            raise SizeError(f"sub must have length {d.size - 1}, got {s.shape}")
        d.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "sub", s)

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1)

    def jacobi(self) -> JacobiOperator:
        """The product D D^T as a :class:`JacobiOperator`."""
        b = self.diag**2
        b[1:] += self.sub**2
        return JacobiOperator(b, self.diag[:-1] * self.sub)

    def gram(self):
        """Diagonal and off-diagonal of D^T D (within the truncation)."""
        diag = self.diag**2
        diag[:-1] += self.sub**2
        return diag, self.sub * self.diag[1:]


def _angles(angles: AngleSequence, N: int) -> np.ndarray:
    if N < 1:
        raise SizeError(f"truncation size must be >= 1, got {N}")
    return angles.take(2 * N + 1)


def build_d_even(angles: AngleSequence, N: int) -> BidiagonalOperator:
    """Even-block factor: d_k = cos t_{2k-1} cos t_{2k}, s_k = sin t_{2k} sin t_{2k+1}."""
    th = _angles(angles, N)
    c, s = np.cos(th), np.sin(th)
    k = np.arange(1, N + 1)
    d = c[2 * k - 1] * c[2 * k]
    sub = s[2 * k] * s[2 * k + 1]
    return BidiagonalOperator(d, sub[:-1], float(sub[-1]))


def build_jacobi(angles: AngleSequence, N: int) -> JacobiOperator:
    """N x N truncation of J.

    b_k = cos^2 t_{2k-1} cos^2 t_{2k} + sin^2 t_{2k-2} sin^2 t_{2k-1} and
    a_k = cos t_{2k-1} cos t_{2k} sin t_{2k} sin t_{2k+1}, with t_0 = 0.
    """
    th = _angles(angles, N)
    c, s = np.cos(th), np.sin(th)
    k = np.arange(1, N + 1)
    b = (c[2 * k - 1] * c[2 * k]) ** 2 + (s[2 * k - 2] * s[2 * k - 1]) ** 2
    a = c[2 * k - 1] * c[2 * k] * s[2 * k] * s[2 * k + 1]
    return JacobiOperator(b, a[:-1])


@dataclass(frozen=True)
class MomentTable:
    """Moments mu_0..mu_P of the spectral measure at the first basis vector."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def order(self) -> int:
        return self.values.size - 1

    def __getitem__(self, p):
        return self.values[p]

    def __len__(self):
        return self.values.size


def moments(J: JacobiOperator, P: int) -> MomentTable:
    """Exact moments <e_1, J^p e_1>, p = 0..P, by repeated application.

    A size-n truncation reproduces moments up to order 2n - 1 (Gauss
    exactness), so size P//2 + 1 suffices.  The symmetric split
    mu_{2j} = |J^j e_1|^2, mu_{2j+1} = <J^j e_1, J^{j+1} e_1> halves the work.
    """
    if P < 0:
        raise DomainError("moment order must be >= 0")
    need = P // 2 + 1
    if J.size < need:
        raise SizeError(f"moments up to order {P} need a truncation of size >= {need}")
    n = min(J.size, P + 2)
    Jl = J.leading(n)
    v = np.zeros(n)
    v[0] = 1.0
    powers = [v]
    for _ in range((P + 1) // 2 + 1):
        powers.append(Jl.matvec(powers[-1]))
    mu = np.empty(P + 1)
    for p in range(P + 1):
        j = p // 2
        mu[p] = powers[j] @ powers[p - j]
    return MomentTable(mu)
