"""Critical line theta_h = theta, theta_v = pi/2 - theta.

Horizontal correlations D_n follow from monic norms of orthogonal polynomials
on [-1, 1] for the weights

    wbar(x)  = [1 - (sin(theta) x)^2]^{1/2}
    wbar#(x) = [1 - (sin(theta) x)^2]^{-1/2}

through a first-order chain alternating D and L, or through the quadratic
identities in A_n, B_n.  Norm products are kept in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core.angles import check_angle
from .errors import ConvergenceError, DomainError, InvariantError

# derivative of the Riemann zeta function at -1
ZETA_PRIME_MINUS_ONE = -0.16542114370045092921
LOG2 = math.log(2.0)
LOGPI = math.log(math.pi)
NORM_RTOL = 1e-10


def c_sigma() -> float:
    """C_sigma = 2^{1/6} exp(3/2 zeta'(-1)) ~ 0.875828."""
    return 2.0 ** (1.0 / 6.0) * math.exp(1.5 * ZETA_PRIME_MINUS_ONE)


@dataclass(frozen=True)
class RealLineOPState:
    """Monic norms ||P_n||^2 (as logs) of one weight, n = 0..n_max."""

    theta: float
    weight: str
    log_norms: np.ndarray
    offdiag: np.ndarray
    nodes: int

    @property
    def norms(self) -> np.ndarray:
        return np.exp(self.log_norms)


def _rule(s: float, weight: str, M: int):
    # x = sin u turns both weights into smooth functions of u on [-pi/2, pi/2]
    g, gw = np.polynomial.legendre.leggauss(M)
    u = 0.5 * math.pi * g
    x = np.sin(u)
    base = 1.0 - (s * x) ** 2
    cu = np.cos(u)
    if weight == "w":
        # (1 - s^2 x^2)^{1/2} cos u, written to stay accurate as s -> 1
        f = np.sqrt(np.clip(base, 0.0, None)) * cu
    elif weight == "w#":
        if s == 1.0:
            f = np.ones_like(u)
        else:
            f = cu / np.sqrt(base)
    else:
        raise DomainError(f"unknown weight {weight!r}; use 'w' or 'w#'")
    return x, 0.5 * math.pi * gw * f


def _lanczos(x, w, n):
    """Recurrence off-diagonals b_1..b_n of the discrete measure sum w_i delta_{x_i}.

    Full reorthogonalization keeps the Stieltjes vectors orthonormal.
    """
    mu0 = w.sum()
    Q = np.zeros((n + 1, x.size))
    q = np.sqrt(w / mu0)
    Q[0] = q
    diag = np.empty(n + 1)
    off = np.empty(n)
    prev = np.zeros_like(q)
    beta = 0.0
    for k in range(n + 1):
        v = x * q
        diag[k] = v @ q
        if k == n:
            break
        v = v - diag[k] * q - beta * prev
        v -= Q[: k + 1].T @ (Q[: k + 1] @ v)
        beta = float(np.linalg.norm(v))
        if beta == 0.0:
            raise InvariantError(f"discrete measure exhausted at degree {k + 1}")
        off[k] = beta
        prev, q = q, v / beta
        Q[k + 1] = q
    return mu0, diag, off


def realline_norms(theta: float, weight: str, n_max: int, nodes: int | None = None) -> RealLineOPState:
    """Monic norms up to degree n_max by a Stieltjes procedure.

    ``theta`` may equal pi/2 (Chebyshev limits).  The rule is doubled until the
    log-norms change by less than ``NORM_RTOL``.
    """
    theta = float(theta)
    if not 0.0 < theta <= 0.5 * math.pi:
        raise DomainError(f"theta = {theta!r} outside (0, pi/2]")
    s = 1.0 if theta == 0.5 * math.pi else math.sin(theta)
    M = nodes or max(256, 4 * (n_max + 1))
    last = None
    for _ in range(6):
        x, w = _rule(s, weight, M)
        mu0, _, off = _lanczos(x, w, n_max)
        logs = math.log(mu0) + np.concatenate(([0.0], 2.0 * np.cumsum(np.log(off))))
        if last is not None and np.max(np.abs(logs - last[0])) <= NORM_RTOL:
            return RealLineOPState(theta, weight, logs, off, M)
        last = (logs, off)
        M *= 2
    raise ConvergenceError(f"real-line norms for theta={theta} did not converge", iterates=(last,))


@dataclass(frozen=True)
class CriticalChain:
    theta: float
    D: np.ndarray
    L: np.ndarray
    A: np.ndarray
    B: np.ndarray
    Dtilde: np.ndarray | None = None


def _log_scaled(state: RealLineOPState) -> np.ndarray:
    n = np.arange(state.log_norms.size)
    return state.log_norms + 2 * n * LOG2 - LOGPI


def critical_correlations(theta: float, n_max: int) -> CriticalChain:
    """D_0..D_{n_max} and L_0..L_{n_max} from the first-order chain.

    L_0 = sin theta, D_1 = ||P#_0||^2 L_0 / (pi sin theta),
    L_1 = sin theta ||P_0||^2 / pi, and for n >= 1
    D_{n+1} = 2^{2n} ||P#_n||^2 L_n / (pi sin theta),
    L_{n+1} = 2^{2n} sin theta ||P_n||^2 D_n / pi.
    """
    theta = check_angle(theta)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    s = math.sin(theta)
    la = _log_scaled(realline_norms(theta, "w", n_max))   # log A_n
    lb = _log_scaled(realline_norms(theta, "w#", n_max))  # log(pi^-1 4^n ||P#_n||^2)
    logD = np.empty(n_max + 1)
    logL = np.empty(n_max + 1)
    logD[0] = 0.0
    logL[0] = math.log(s)
    logD[1] = lb[0] + logL[0] - math.log(s)
    logL[1] = la[0] + math.log(s)
    for n in range(1, n_max):
        logD[n + 1] = lb[n] + logL[n] - math.log(s)
        logL[n + 1] = la[n] + math.log(s) + logD[n]
    D, L = np.exp(logD), np.exp(logL)
    if np.any(D <= 0) or np.any(D > 1 + 1e-12):
        raise InvariantError("critical chain left (0, 1]")
    return CriticalChain(theta, D, L, np.exp(la), np.exp(lb))


def quadratic_chain(theta: float, n_max: int) -> CriticalChain:
    """D_n from the one-step quadratic identities.

    With A_n = 4^n ||P_n||^2 / pi, B_n = 4^n ||P#_n||^2 / pi and D~_n fixed by
    L_n = (sin theta / 2)(D_n + cos theta D~_n):

        D_{n+1} + cos(theta) D~_{n+1} = 2 A_n D_n
        D_{n+1} - cos(theta) D~_{n+1} = (sin^2 theta / 2) B_{n+1} D_n

    so D_{m+1}/D_m = A_m + (sin^2 theta / 4) B_{m+1}.  The harmonic companion
    (see :func:`harmonic_ratios`) gives the same ratios from (A_{m-1}, B_m).
    """
    theta = check_angle(theta)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    u = 0.25 * math.sin(theta) ** 2
    A = np.exp(_log_scaled(realline_norms(theta, "w", n_max)))
    B = np.exp(_log_scaled(realline_norms(theta, "w#", n_max + 1)))
    ratio = A[:n_max] + u * B[1 : n_max + 1]
    D = np.concatenate(([1.0], np.cumprod(ratio)))
    Dt = np.concatenate(([math.nan], (2.0 * A[:n_max] * D[:n_max] - D[1:]) / math.cos(theta)))
    return CriticalChain(theta, D, np.full(n_max + 1, math.nan), A, B, Dt)


def harmonic_ratios(chain: CriticalChain) -> np.ndarray:
    """(sin^2 theta / (4 A_{m-1}) + 1/B_m)^{-1} for m = 1..n_max; equals D_{m+1}/D_m."""
    u = 0.25 * math.sin(chain.theta) ** 2
    n = chain.A.size - 1
    return 1.0 / (u / chain.A[:n] + 1.0 / chain.B[1 : n + 1])


def log_product_identity(theta: float, m: int) -> float:
    """log of pi^{-2m-1} 2^{2m^2} prod_{k<m} ||P_k||^2 prod_{k<=m} ||P#_k||^2."""
    a = realline_norms(theta, "w", max(m - 1, 0)).log_norms[:m]
    b = realline_norms(theta, "w#", m).log_norms[: m + 1]
    return -(2 * m + 1) * LOGPI + 2 * m * m * LOG2 + a.sum() + b.sum()


def mccoy_wu_check(theta: float, m: int, chain: CriticalChain | None = None) -> float:
    """D_m (2 m cos theta)^{1/4} / C_sigma^2, which tends to 1."""
    if m < 10:
        raise DomainError("mccoy_wu_check needs m >= 10")
    if chain is None or chain.D.size <= m:
        chain = critical_correlations(theta, m)
    return float(chain.D[m] * (2 * m * math.cos(theta)) ** 0.25 / c_sigma() ** 2)
