"""Spectral quadrature of J and determinants of minors of J^{1/2} and U."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr, solve_banded, solve_triangular, svd

from ..errors import ConditioningError, InvariantError, NumericError, SizeError
from .eigen import tridiagonal_eigh
from .jacobi import BidiagonalOperator, JacobiOperator
from .logdet import ONE, LogDet, logdet

NEGATIVE_TOL = 1e-10
SMALL_EIG = 1e-6
MAX_SMALL = 64
INVERSE_STEPS = 3


@dataclass(frozen=True)
class SpectralQuadrature:
    """Atoms of the spectral measure of a truncation at e_1 (Gauss rule)."""

    nodes: np.ndarray
    weights: np.ndarray

    def moment(self, p: float) -> float:
        lam = np.clip(self.nodes, 0.0, None) if p != int(p) else self.nodes
        return float(self.weights @ lam**p)

    def moments(self, P: int, shift: float = 0.0) -> np.ndarray:
        """sum_i w_i lambda_i^(p + shift) for p = 0..P."""
        lam = np.clip(self.nodes, 0.0, None) if shift else self.nodes
        base = self.weights * lam**shift if shift else self.weights.copy()
        out = np.empty(P + 1)
        for p in range(P + 1):
            out[p] = base.sum()
            base = base * lam
        return out


def _eig(J: JacobiOperator, rows: int):
    evals, z = tridiagonal_eigh(J.diag, J.offdiag, rows=rows)
    if evals[0] < -NEGATIVE_TOL:
        raise InvariantError(f"Jacobi truncation has eigenvalue {evals[0]:.3e} < 0")
    return np.clip(evals, 0.0, None), z


def _small_subspace(J: JacobiOperator, D: BidiagonalOperator, lam: np.ndarray):
    """Singular values and vectors of D^T for the given small eigenvalues of J = D D^T.

    An eigenvalue carries an absolute error of order eps, so sqrt(lambda)
    is only good to sqrt(eps) near zero.  Full eigenvectors are found by
    shifted inverse iteration and a Rayleigh-Ritz step on D^T Q returns
    singular values with absolute error of order eps instead.
    """
    N = J.size
    ab = np.zeros((3, N))
    ab[0, 1:] = J.offdiag
    ab[2, :-1] = J.offdiag
    rng = np.random.default_rng(0)
    cols = []
    for mu in lam:
        ab[1] = J.diag - mu
        v = rng.standard_normal(N)
        for _ in range(INVERSE_STEPS):
            try:
                v = solve_banded((1, 1), ab, v, check_finite=False)
            except np.linalg.LinAlgError:
                # exactly singular shift: nudge it
                ab[1] = J.diag - mu - 1e-15
                v = solve_banded((1, 1), ab, v, check_finite=False)
            if not np.all(np.isfinite(v)):
                raise NumericError("inverse iteration overflowed")
            v /= np.linalg.norm(v)
        cols.append(v)
    Q, _ = qr(np.column_stack(cols), mode="economic")
    B = D.diag[:, None] * Q  # D^T Q, D^T upper bidiagonal
    B[:-1] += D.sub[:, None] * Q[1:]
    _, sig, wt = svd(B, full_matrices=False)
    return sig[::-1], (Q @ wt.T)[:, ::-1]


def sqrt_spectrum(J: JacobiOperator, rows: int, factor: BidiagonalOperator | None = None):
    """(sqrt of eigenvalues ascending, first ``rows`` rows of eigenvectors) of J.

    With ``factor`` (J = D D^T) the small end of the spectrum is recomputed
    from D, which keeps J^{1/2} accurate when J is nearly singular.
    """
    lam, z = _eig(J, rows)
    sig = np.sqrt(lam)
    if factor is None:
        return sig, z
    k = int(np.searchsorted(lam, SMALL_EIG))
    if k == 0:
        return sig, z
    if k > MAX_SMALL:
        raise ConditioningError(f"{k} eigenvalues below {SMALL_EIG:g}", step=k)
    s_small, v_small = _small_subspace(J, factor, lam[:k])
    sig = np.concatenate((s_small, sig[k:]))
    z = np.concatenate((v_small[:rows], z[:, k:]), axis=1)
    return sig, z


def spectral_quadrature(J: JacobiOperator, factor: BidiagonalOperator | None = None) -> SpectralQuadrature:
    sig, z = sqrt_spectrum(J, 1, factor)
    return SpectralQuadrature(sig**2, z[0] ** 2)


def sqrt_minor_logdet(J: JacobiOperator, m: int, factor: BidiagonalOperator | None = None) -> LogDet:
    """log det of the leading m x m block of J^{1/2}; ``factor`` as in sqrt_spectrum."""
    if m == 0:
        return ONE
    if J.size < m:
        raise SizeError(f"minor of order {m} requested from a size-{J.size} truncation")
    sig, z = sqrt_spectrum(J, m, factor)
    return logdet((z * sig) @ z.T)


def polar_minor_logdet(D: BidiagonalOperator, m: int) -> LogDet:
    """log|det| of the leading m x m block of U = D^T (D D^T)^{-1/2}.

    D is lower bidiagonal with positive diagonal, hence invertible, and
    U = D^{-1} (D D^T)^{1/2}.  D^{-1} is lower triangular, so the leading
    block factors exactly: U_m = D_m^{-1} S_m with S = (D D^T)^{1/2}.  U_m is
    formed by a triangular solve.  No singular value is ever divided by, so
    near-null directions of supercritical truncations cost nothing.
    """
    if m == 0:
        return ONE
    if D.size < m:
        raise SizeError(f"minor of order {m} requested from a size-{D.size} truncation")
    b = D.diag**2
    b[1:] += D.sub**2
    sig, z = sqrt_spectrum(JacobiOperator(b, D.diag[:-1] * D.sub), m, D)
    S = (z * sig) @ z.T
    Dm = np.diag(D.diag[:m]) + np.diag(D.sub[: m - 1], -1)
    u = solve_triangular(Dm, S, lower=True)
    if not np.all(np.isfinite(u)):
        raise NumericError("leading block of the polar factor overflowed")
    ld = logdet(u)
    return LogDet(abs(ld.sign), ld.log_abs)
