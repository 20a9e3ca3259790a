"""Magnetization of the layered zig-zag half-plane and periodic spectral data.

M_m is computed by three expressions that coincide at every truncation N:

* ``hankel``: H_m[lambda^{1/2} nu] / (H_m[nu] H_m[lambda nu])^{1/2}
* ``sqrt``:   det P_m J^{1/2} P_m / prod_{k<=2m} cos(theta_k)
* ``polar``:  |det P_m U P_m| with U the polar factor of D^T

where nu is the spectral measure of J at e_1.  Only the lambda^{1/2}
dependence makes the value N-dependent; the truncation is refined by
doubling with a Richardson step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core.angles import AngleSequence, check_angle
from .core.jacobi import build_d_even, build_jacobi
from .core.logdet import logdet
from .core.spectral import polar_minor_logdet, spectral_quadrature, sqrt_minor_logdet
from .errors import ConditioningError, ConvergenceError, DomainError, PreconditionError, SizeError

METHODS = ("hankel", "sqrt", "polar")
DEFAULT_TOL = 1e-8
N_CAP = 2**14
HANKEL_MAX_M = 12
CRITICAL_TOL = 1e-12


@dataclass(frozen=True)
class MagnetizationReport:
    m: int
    value: float
    method: str
    N: int
    error: float
    history: tuple = field(default=(), repr=False)


def _cos_log_product(angles: AngleSequence, m: int) -> float:
    th = angles.take(2 * m)[1:]
    return float(np.sum(np.log(np.cos(th))))


def magnetization_at(angles: AngleSequence, m: int, N: int, method: str = "sqrt") -> float:
    """M_m from the N x N truncation, without refinement."""
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {METHODS}")
    if m == 0:
        return 1.0
    if N < m:
        raise SizeError(f"truncation N={N} smaller than m={m}")
    if method == "polar":
        return polar_minor_logdet(build_d_even(angles, N), m).value
    J = build_jacobi(angles, N)
    D = build_d_even(angles, N)
    if method == "sqrt":
        ld = sqrt_minor_logdet(J, m, D)
        return math.exp(ld.log_abs - _cos_log_product(angles, m)) * ld.sign
    return _hankel_ratio(spectral_quadrature(J, D), m)


def _hankel_ratio(q, m: int) -> float:
    """H_m[lambda^{1/2} nu] / (H_m[nu] H_m[lambda nu])^{1/2} from Gauss nodes and weights.

    Each Hankel determinant is the Gram determinant of any monic basis, so the
    monomials are replaced by shifted Chebyshev polynomials T_i(2 lambda - 1)
    (spectrum in [0, 1]); their leading coefficients cancel in the ratio.
    The modified moments keep the Gram matrices well conditioned.
    """
    lam = np.clip(q.nodes, 0.0, 1.0)
    T = np.polynomial.chebyshev.chebvander(2.0 * lam - 1.0, m - 1).T  # (m, nodes)
    grams = [(T * (q.weights * f)) @ T.T for f in (np.sqrt(lam), 1.0, lam)]
    h_half, h0, h1 = (logdet(g) for g in grams)
    if h0.sign <= 0 or h1.sign <= 0 or h_half.sign <= 0:
        raise ConditioningError(f"Hankel moment matrix of order {m} lost positivity", step=m)
    return h_half.sign * math.exp(h_half.log_abs - 0.5 * (h0.log_abs + h1.log_abs))


def magnetization(
    angles: AngleSequence,
    m: int,
    method: str = "sqrt",
    tol: float = DEFAULT_TOL,
    N0: int | None = None,
    N_max: int = N_CAP,
) -> MagnetizationReport:
    """Magnetization M_m of column 2m with adaptive truncation.

    The truncation starts at ``max(64, 8m)`` and doubles.  Each step forms the
    Richardson value R_N = v_N + (v_N - v_{N/2})/3 (the raw error decays like
    N^-2 when the spectrum reaches 0, and geometrically otherwise) and stops
    once |R_N - R_{N/2}| <= tol * |R_N|.

    Raises
    ------
    ConvergenceError
        if ``N_max`` is reached first; carries the last two (N, value) pairs.
    """
    if m < 0:
        raise DomainError(f"column index m must be >= 0, got {m}")
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {METHODS}")
    if method == "hankel" and m > HANKEL_MAX_M:
        raise DomainError(f"hankel path is limited to m <= {HANKEL_MAX_M}; use 'sqrt'")
    if m == 0:
        return MagnetizationReport(0, 1.0, method, 0, 0.0)
    avail = angles.available
    N = N0 or max(64, 8 * m)
    if avail is not None:
        N = min(N, (avail - 1) // 2)
        if N < m:
            raise SizeError(f"{avail} angles cannot support column m={m}")
    raw, rich = [], []
    while True:
        v = magnetization_at(angles, m, N, method)
        raw.append((N, v))
        if len(raw) >= 2:
            rich.append((N, v + (v - raw[-2][1]) / 3.0))
        if len(rich) >= 2:
            err = abs(rich[-1][1] - rich[-2][1])
            if err <= tol * abs(rich[-1][1]):
                return MagnetizationReport(m, rich[-1][1], method, N, err, tuple(raw))
        nxt = 2 * N
        if avail is not None and 2 * nxt + 1 > avail:
            # a finite list is exhausted: its truncation is exact
            if len(rich) >= 1:
                err = abs(rich[-1][1] - (rich[-2][1] if len(rich) > 1 else raw[-2][1]))
                return MagnetizationReport(m, rich[-1][1], method, N, err, tuple(raw))
            return MagnetizationReport(m, v, method, N, math.nan, tuple(raw))
        if nxt > N_max:
            raise ConvergenceError(
                f"M_{m} ({method}) not converged to {tol:g} at N={N}",
                iterates=tuple(rich[-2:]) or tuple(raw[-2:]),
            )
        N = nxt


def kernel_residual_homogeneous(theta: float, N: int) -> float:
    """Max |D^T psi| over rows 1..N-1 for psi_k = cot(theta)^{2k}, normalized.

    D carries its signed subdiagonal here (diag cos^2, sub -sin^2).  The last
    row touches the truncation edge and is excluded.
    """
    theta = check_angle(theta)
    if theta <= math.pi / 4:
        raise DomainError("kernel vector is square-summable only for theta > pi/4")
    if N < 2:
        raise SizeError("need N >= 2")
    k = np.arange(1, N + 1)
    psi = (1.0 / math.tan(theta)) ** (2 * k)
    psi /= np.linalg.norm(psi)
    d, s = math.cos(theta) ** 2, math.sin(theta) ** 2
    r = d * psi[:-1] - s * psi[1:]
    return float(np.max(np.abs(r)))


# periodic blocks --------------------------------------------------------------


def _block(block) -> np.ndarray:
    th = np.asarray(block, dtype=float)
    if th.ndim != 1 or th.size == 0 or th.size % 2:
        raise SizeError(f"period block must have even positive length, got {th.size}")
    for i, t in enumerate(th, start=1):
        check_angle(t, i)
    return th


def periodic_criticality(block, tol: float = CRITICAL_TOL):
    """Return (prod tan theta_k, critical flag)."""
    th = _block(block)
    prod = float(np.exp(np.sum(np.log(np.tan(th)))))
    return prod, abs(prod - 1.0) <= tol


def _require_critical(block) -> np.ndarray:
    th = _block(block)
    prod, crit = periodic_criticality(th)
    if not crit:
        raise PreconditionError(f"block is not critical: prod tan theta = {prod!r}")
    return th


def periodic_coefficients(block):
    """(b_1..b_n, a_1..a_n) of the periodic J; a_n couples row n to row n+1 = row 1."""
    th = _block(block)
    n = th.size // 2
    ext = np.concatenate(([th[-1]], th, [th[0]]))  # theta_0..theta_{2n+1}
    c, s = np.cos(ext), np.sin(ext)
    k = np.arange(1, n + 1)
    b = (c[2 * k - 1] * c[2 * k]) ** 2 + (s[2 * k - 2] * s[2 * k - 1]) ** 2
    a = c[2 * k - 1] * c[2 * k] * s[2 * k] * s[2 * k + 1]
    return b, a


def ground_vector(block) -> np.ndarray:
    """psi_k = (sin theta_{2k-1})^{-1} prod_{p<=2k-2} cot theta_p, k = 1..n+1.

    Null vector of the periodic J with signed off-diagonal -a_k.
    """
    th = _require_critical(block)
    n = th.size // 2
    ext = np.concatenate((th, th[:1]))
    logcot = np.concatenate(([0.0], np.cumsum(-np.log(np.tan(th)))))
    k = np.arange(1, n + 2)
    return np.exp(logcot[2 * k - 2]) / np.sin(ext[2 * k - 2])


def cj_constant(block, psi=None) -> float:
    """C_J = [n^-2 sum psi_k^2 * sum (a_k psi_k psi_{k+1})^-1]^{1/2}."""
    th = _require_critical(block)
    n = th.size // 2
    if psi is None:
        psi = ground_vector(th)
    psi = np.asarray(psi, dtype=float)
    _, a = periodic_coefficients(th)
    return float(math.sqrt(np.sum(psi[:n] ** 2) * np.sum(1.0 / (a * psi[:n] * psi[1 : n + 1]))) / n)


@dataclass(frozen=True)
class PeriodicSpectralData:
    n: int
    psi: np.ndarray
    cj: float
    tan_product: float


def periodic_spectral_data(block) -> PeriodicSpectralData:
    th = _require_critical(block)
    prod, _ = periodic_criticality(th)
    psi = ground_vector(th)
    return PeriodicSpectralData(th.size // 2, psi, cj_constant(th, psi), prod)


def periodic_matrix(block, periods: int) -> np.ndarray:
    """Dense (N n) x (N n) periodic truncation with signed off-diagonal and corner coupling."""
    b, a = periodic_coefficients(block)
    n = b.size
    size = n * periods
    if size < 3:
        raise SizeError("periodic truncation needs at least 3 rows")
    bb = np.tile(b, periods)
    aa = np.tile(a, periods)
    M = np.diag(bb) - np.diag(aa[:-1], 1) - np.diag(aa[:-1], -1)
    M[0, -1] -= aa[-1]
    M[-1, 0] -= aa[-1]
    return M


@dataclass(frozen=True)
class IDSResult:
    grid: np.ndarray
    ids: np.ndarray
    slope: float
    fit_max: float
    size: int


def ids_empirical(block, N_periods: int = 512, lam_grid=None, lam_max: float = 0.05,
                  fit_fraction: float = 0.1, points: int = 200) -> IDSResult:
    """Integrated density of states of the periodic truncation.

    ``slope`` is the weighted least-squares slope through the origin of
    IDS(lambda) against sqrt(lambda)/pi over lambda <= fit_fraction * lam_max,
    weights 1/sqrt(lambda); it estimates C_J.  The default grid is uniform in
    sqrt(lambda).
    """
    th = _require_critical(block)
    if N_periods < 64:
        raise SizeError("ids_empirical needs at least 64 periods")
    ev = np.linalg.eigvalsh(periodic_matrix(th, N_periods))
    if lam_grid is None:
        lam_grid = np.linspace(math.sqrt(lam_max) / points, math.sqrt(lam_max), points) ** 2
    grid = np.asarray(lam_grid, dtype=float)
    ids = np.searchsorted(ev, grid, side="right") / ev.size
    fit_max = fit_fraction * float(grid.max())
    sel = (grid > 0) & (grid <= fit_max)
    if sel.sum() < 2:
        raise SizeError("too few grid points inside the fit window")
    x = np.sqrt(grid[sel]) / math.pi
    wt = 1.0 / np.sqrt(grid[sel])
    slope = float(np.sum(wt * x * ids[sel]) / np.sum(wt * x * x))
    return IDSResult(grid, ids, slope, fit_max, ev.size)


def twisted_block(block, t: float) -> np.ndarray:
    """n x n Hermitian block with Floquet twist t distributed along the period.

    The phase on bond q is t * phi_q with phi_q proportional to
    (a_q psi_q psi_{q+1})^{-1} and sum phi_q = 1, so the twisted ground vector
    stays close to psi and lambda(t) ~ (n C_J)^{-2} t^2.
    """
    th = _require_critical(block)
    b, a = periodic_coefficients(th)
    psi = ground_vector(th)
    n = b.size
    inv = 1.0 / (a * psi[:n] * psi[1 : n + 1])
    phi = inv / inv.sum()
    M = np.diag(b).astype(complex)
    for q in range(n):
        r = (q + 1) % n
        z = -a[q] * np.exp(1j * t * phi[q])
        M[q, r] += z
        M[r, q] += np.conj(z)
    return M


def twisted_lowest_eigenvalue(block, t: float) -> float:
    if abs(t) > math.pi + 1e-15:
        raise DomainError("twist must satisfy |t| <= pi")
    lam = np.linalg.eigvalsh(twisted_block(block, t))[0]
    return float(max(lam, 0.0)) if abs(lam) < 1e-14 else float(lam)
