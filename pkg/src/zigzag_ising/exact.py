"""Closed forms at the fully critical point theta = pi/4 of the rotated lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import eval_legendre

from .critical import c_sigma
from .errors import DomainError, SizeError

SQRT2 = math.sqrt(2.0)


def _log_factor(k: np.ndarray) -> np.ndarray:
    # log(1 - 1/(4k^2))
    return np.log1p(-0.25 / (k.astype(float) ** 2))


def wu_diagonal_log(n: int) -> float:
    if n < 0:
        raise DomainError("n must be >= 0")
    k = np.arange(1, n)
    return n * math.log(2.0 / math.pi) + math.fsum((k - n) * _log_factor(k))


def wu_diagonal(n: int) -> float:
    """D_n = (2/pi)^n prod_{k=1}^{n-1} (1 - 1/(4k^2))^{k-n}."""
    return math.exp(wu_diagonal_log(n))


def wu_rational(n: int) -> Fraction:
    """Rational factor R_n with D_n = (2/pi)^n R_n."""
    r = Fraction(1)
    for k in range(1, n):
        r *= Fraction(4 * k * k - 1, 4 * k * k) ** (k - n)
    return r


def zigzag_magnetization_log(m: int) -> float:
    if m < 0:
        raise DomainError("m must be >= 0")
    k = np.arange(1, 2 * m)
    return m * math.log(2.0 / math.pi) + math.fsum((k // 2 - m) * _log_factor(k))


def zigzag_magnetization_exact(m: int) -> float:
    """M_m = (2/pi)^m prod_{k=1}^{2m-1} (1 - 1/(4k^2))^{floor(k/2) - m}."""
    return math.exp(zigzag_magnetization_log(m))


def zigzag_rational(m: int) -> Fraction:
    r = Fraction(1)
    for k in range(1, 2 * m):
        r *= Fraction(4 * k * k - 1, 4 * k * k) ** (k // 2 - m)
    return r


def zigzag_magnetization_ratio(m: int) -> float:
    """M_m assembled from M_{j+1}/M_j = D_{2j+2}/D_{2j+1}."""
    if m < 0:
        raise DomainError("m must be >= 0")
    logs = sum(wu_diagonal_log(2 * j + 2) - wu_diagonal_log(2 * j + 1) for j in range(m))
    return math.exp(logs)


def half_integer_identity(m: int) -> float:
    """M_{m+1/2} = sqrt(2) D_{2m+1} / M_m, with M_{-1/2} = sqrt(2)."""
    if m == -1:
        return SQRT2
    if m < 0:
        raise DomainError("m must be >= -1")
    return SQRT2 * math.exp(wu_diagonal_log(2 * m + 1) - zigzag_magnetization_log(m))


def diagonal_asymptotics_check(n: int):
    """(D_n (2n)^{1/4} / C^2, M_n (2n)^{1/8} / (2^{1/8} C)) with C = C_sigma."""
    if n < 10:
        raise DomainError("asymptotic check needs n >= 10")
    cs = c_sigma()
    d = math.exp(wu_diagonal_log(n) + 0.25 * math.log(2 * n)) / cs**2
    mm = math.exp(zigzag_magnetization_log(n) + 0.125 * math.log(2 * n)) / (2 ** 0.125 * cs)
    return d, mm


# Legendre spinor -------------------------------------------------------------

PANEL_NODES = 96


def _panels(nodes: int):
    g, gw = np.polynomial.legendre.leggauss(nodes)
    t, w = [], []
    for a, b in ((0.0, 0.5 * math.pi), (0.5 * math.pi, math.pi)):
        t.append(0.5 * (b - a) * g + 0.5 * (a + b))
        w.append(0.5 * (b - a) * gw)
    return np.concatenate(t), np.concatenate(w)


def spinor_y(t):
    """y(t) = (1 - |sin t|)/cos t, evaluated as cos t / (1 + |sin t|)."""
    t = np.asarray(t, dtype=float)
    return np.cos(t) / (1.0 + np.abs(np.sin(t)))


@dataclass(frozen=True)
class SpinorField:
    n: int
    K: int
    S: int
    C: float
    values: np.ndarray  # shape (2K+1, S+1), row k+K, column s

    def __call__(self, k: int, s: int) -> float:
        s = abs(s)
        if abs(k) > self.K or s > self.S:
            raise SizeError(f"({k}, {s}) outside the computed grid")
        return float(self.values[k + self.K, s])


def legendre_spinor(n: int, K: int, S: int, nodes: int = PANEL_NODES) -> SpinorField:
    """V(k, s) = (C_n/pi) int_0^pi cos(kt) y(t)^s P_n(cos t) dt.

    C_n = D_n 2^n / p_n, p_n the leading coefficient of P_n, so V(n, 0) = D_n.
    Entries with k + s + n odd vanish by symmetry and are stored as 0.
    The integrand is smooth on each panel [0, pi/2], [pi/2, pi].
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if K < n + 2 or S < 2:
        raise SizeError("grid needs K >= n + 2 and S >= 2")
    t, w = _panels(nodes)
    p_lead = math.comb(2 * n, n) / 2**n
    C = math.exp(wu_diagonal_log(n)) * 2**n / p_lead
    y = spinor_y(t)
    base = w * eval_legendre(n, np.cos(t)) * C / math.pi
    ks = np.arange(-K, K + 1)
    cos_kt = np.cos(np.outer(ks, t))
    ypow = y[None, :] ** np.arange(S + 1)[:, None]
    V = cos_kt @ (base[:, None] * ypow.T)
    parity = (ks[:, None] + np.arange(S + 1)[None, :] + n) % 2 == 1
    V[parity] = 0.0
    return SpinorField(n, K, S, C, V)


def spinor_laplacian(field: SpinorField) -> np.ndarray:
    """Delta V = -V + (1/4) sum V(k +- 1, s +- 1), using V(k, -s) = V(k, s).

    Defined for |k| <= K-1, 0 <= s <= S-1; shape (2K-1, S).
    """
    V = field.values
    ext = np.concatenate((V[:, 1:2], V), axis=1)  # column 0 is s = -1
    nb = ext[:-2, :-2] + ext[2:, :-2] + ext[:-2, 2:] + ext[2:, 2:]
    return -V[1:-1, :-1] + 0.25 * nb


def spinor_laplacian_residuals(field: SpinorField) -> dict:
    """Interior (s >= 1) maximum |Delta V| and the branch values Delta V(+-n, 0)."""
    lap = spinor_laplacian(field)
    K, n = field.K, field.n
    interior = float(np.max(np.abs(lap[:, 1:])))
    on_cut = float(np.max(np.abs(lap[K - 1 - n + 1 : K - 1 + n, 0]))) if n >= 1 else 0.0
    return {
        "interior": interior,
        "segment": on_cut,
        "branch_plus": float(lap[K - 1 + n, 0]),
        "branch_minus": float(lap[K - 1 - n, 0]),
    }
