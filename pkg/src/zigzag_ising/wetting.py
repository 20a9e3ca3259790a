"""Boundary magnetic field: Toeplitz+Hankel determinant for M_m.

Setup: theta_k = theta < pi/4 for k >= 2 and a different theta_1.  With
q = tan(theta), r = 1 - cos^2(theta_1)/cos^2(theta), w(z) = |1 - q^2 z| and

    xi(z) = (r z - q^2)(q^2 z - 1) / ((z - q^2)(q^2 z - r)),

the magnetization is

    M_m = (1-r)^{-3/2} det[alpha_{k-n} - beta_{k+n} + (1-r)^{3/2} gamma_{k+n}],

alpha_s, beta_s the Fourier coefficients of w and xi w, and gamma_s =
c (q^2/r)^s for r > q^2 (a bound state of J), else 0.

A second sign/index arrangement, det[alpha_{k-n} + beta_{k+n} +
(1-r)^{3/2} c zeta_0^{k+n-1}], is evaluated as a diagnostic.  The first
arrangement is the one that reproduces the layered engine; that choice is
re-certified against the layered engine on every checked call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core.angles import AngleSequence, check_angle, coupling_from_theta
from .core.logdet import logdet
from .errors import ConsistencyError, ConvergenceError, DomainError

VARIANTS = ("statement", "alternate")
FOURIER_TOL = 1e-13
MAX_POINTS = 2**22
MATCH_TOL = 1e-5
DEFAULT_M_CAP = 24
FIELD_RTOL = 1e-12  # r within this relative distance of q^2 is the critical field


@dataclass(frozen=True)
class WettingModel:
    theta: float
    theta1: float

    def __post_init__(self):
        check_angle(self.theta)
        check_angle(self.theta1, 1)
        if self.theta >= 0.25 * math.pi:
            raise DomainError("bulk angle must be subcritical (theta < pi/4)")

    @classmethod
    def from_qr(cls, q: float, r: float) -> "WettingModel":
        if not 0.0 < q < 1.0:
            raise DomainError("q must lie in (0, 1)")
        if not -q * q < r < 1.0:
            raise DomainError("r must lie in (-q^2, 1)")
        theta = math.atan(q)
        return cls(theta, math.acos(math.sqrt(1.0 - r) * math.cos(theta)))

    @property
    def q(self) -> float:
        return math.tan(self.theta)

    @property
    def r(self) -> float:
        return 1.0 - (math.cos(self.theta1) / math.cos(self.theta)) ** 2

    @property
    def bound_state(self) -> bool:
        q2 = self.q**2
        return self.r > q2 * (1.0 + FIELD_RTOL)

    @property
    def zeta0(self) -> float:
        r = self.r
        return self.q**2 / r if r > 0 else math.nan

    @property
    def c(self) -> float:
        q2, r = self.q**2, self.r
        if not self.bound_state:
            return 0.0
        return (r * r - q2 * q2) * r**-1.5 * (r - q2 * q2) ** -0.5

    @property
    def a(self) -> float:
        return (math.sin(self.theta) * math.cos(self.theta)) ** 2

    def w(self, z):
        return np.abs(1.0 - self.q**2 * np.asarray(z))

    def xi(self, z):
        z = np.asarray(z, dtype=complex)
        q2, r = self.q**2, self.r
        if r == q2:
            # the factor (z - 1) cancels
            return (q2 * z - 1.0) / (z - q2)
        return (r * z - q2) * (q2 * z - 1.0) / ((z - q2) * (q2 * z - r))

    def eigenvalue(self) -> float:
        """Bound-state eigenvalue lambda(zeta_0) of J when r > q^2."""
        if not self.bound_state:
            return math.nan
        q2, r = self.q**2, self.r
        return (1 - r) * (r - q2 * q2) / (r * (1 + q2) ** 2)

    def angles(self) -> AngleSequence:
        return AngleSequence.homogeneous_with_first(self.theta1, self.theta)

    def canonical(self) -> dict:
        return {"theta": self.theta, "theta1": self.theta1, "q": self.q, "r": self.r}


@dataclass(frozen=True)
class FourierBank:
    """alpha_0..alpha_S (alpha_{-s} = alpha_s), beta_0..beta_S, gamma_0..gamma_S."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    beta_imag: float
    points: int


def _fourier(f, S: int, rho: float = 1.0):
    """c_s = (2 pi i)^{-1} oint_{|z|=rho} z^{-s-1} f(z) dz, s = 0..S, trapezoid with doubling."""
    M = max(1024, 1 << int(math.ceil(math.log2(8 * (S + 1)))))
    scale = rho ** -np.arange(S + 1, dtype=float)
    prev = None
    while M <= MAX_POINTS:
        z = rho * np.exp(2j * math.pi * np.arange(M) / M)
        c = np.fft.fft(f(z))[: S + 1] / M * scale
        if prev is not None and np.max(np.abs(c - prev)) <= FOURIER_TOL:
            return c, M
        prev = c
        M *= 2
    raise ConvergenceError("wetting Fourier coefficients did not converge", iterates=(prev,))


def _contour_radius(model: WettingModel) -> float:
    """Radius inside the annulus q^2 < |z| < q^-2 where xi * w is analytic,
    on the same side of every pole as the unit circle, log-centred in that gap."""
    q2, r = model.q**2, model.r
    lo, hi = math.log(q2), -math.log(q2)
    if r != q2 and r != 0.0:
        lp = math.log(abs(r / q2))
        if lo < lp < hi:
            if lp >= 0.0:
                hi = lp
            else:
                lo = lp
    return math.exp(0.5 * (lo + hi))


def _w_analytic(model: WettingModel, z):
    # continuation of |1 - q^2 z| off the unit circle
    q2 = model.q**2
    return np.sqrt(1.0 - q2 * z) * np.sqrt(1.0 - q2 / z)


def wetting_coefficients(model: WettingModel, s_max: int) -> FourierBank:
    """alpha_s, beta_s by the trapezoid rule and gamma_s in closed form.

    beta_s is integrated over a circle |z| = rho chosen so that no singularity
    of xi * w lies between it and the unit circle; this keeps the rule
    spectrally accurate when the pole of xi approaches the unit circle
    (r near q^2).
    """
    if s_max < 0:
        raise DomainError("s_max must be >= 0")
    alpha, _ = _fourier(model.w, s_max)
    rho = _contour_radius(model)
    beta, M = _fourier(lambda z: model.xi(z) * _w_analytic(model, z), s_max, rho)
    s = np.arange(s_max + 1)
    gamma = model.c * model.zeta0**s if model.bound_state else np.zeros(s_max + 1)
    return FourierBank(alpha.real, beta.real, gamma, float(np.max(np.abs(beta.imag))), M)


def toeplitz_hankel(toe, hank, m: int) -> np.ndarray:
    """[toe[|k-n|] + hank[k+n]]_{k,n<m}."""
    k = np.arange(m)
    return np.asarray(toe)[np.abs(k[:, None] - k[None, :])] + np.asarray(hank)[k[:, None] + k[None, :]]


def _variant_values(model: WettingModel, m: int, bank: FourierBank) -> dict:
    r = model.r
    s15 = (1.0 - r) ** 1.5
    idx = np.arange(2 * m - 1)
    A = toeplitz_hankel(bank.alpha, -bank.beta[: 2 * m - 1] + s15 * bank.gamma[: 2 * m - 1], m)
    if model.bound_state:
        hank_alt = bank.beta[: 2 * m - 1] + s15 * model.c * model.zeta0 ** (idx - 1.0)
    else:
        hank_alt = bank.beta[: 2 * m - 1]
    B = toeplitz_hankel(bank.alpha, hank_alt, m)
    out = {}
    for name, mat in (("statement", A), ("alternate", B)):
        ld = logdet(mat)
        out[name] = ld.sign * math.exp(ld.log_abs - 1.5 * math.log1p(-r)) if ld.sign else 0.0
    return out


@dataclass(frozen=True)
class WettingResult:
    m: int
    value: float
    variant: str
    variants: dict
    reference: float | None
    mismatch: float


def wetting_magnetization(model: WettingModel, m: int, check: bool = True,
                          tol: float = MATCH_TOL, m_cap: int = DEFAULT_M_CAP) -> WettingResult:
    """M_m from the Toeplitz+Hankel determinant.

    With ``check`` the layered engine on the angle sequence (theta_1, theta,
    theta, ...) is evaluated too and the determinant arrangement that matches
    it is returned; if neither matches within ``tol`` a ConsistencyError is
    raised.  Without ``check`` the ``statement`` arrangement is returned.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    if m > m_cap:
        raise DomainError(f"m = {m} exceeds the cap {m_cap}")
    bank = wetting_coefficients(model, 2 * m)
    vals = _variant_values(model, m, bank)
    mismatch = abs(vals["statement"] - vals["alternate"])
    if not check:
        return WettingResult(m, vals["statement"], "statement", vals, None, mismatch)
    from .layered import magnetization

    ref = magnetization(model.angles(), m, "sqrt", tol=min(1e-10, tol * 1e-3)).value
    for name in VARIANTS:
        if abs(vals[name] - ref) <= tol:
            return WettingResult(m, vals[name], name, vals, ref, mismatch)
    raise ConsistencyError(
        f"no determinant arrangement reproduces the layered value {ref!r} at m={m}",
        {"variants": vals, "reference": ref, "q": model.q, "r": model.r},
    )


def free_boundary_limit(q: float) -> float:
    """M_1 as r -> 1: (1 - q^4)^{1/2}."""
    return math.sqrt(1.0 - q**4)


def critical_field(q: float):
    """theta_1 and the field h = 2 beta J_1 at which r = q^2.

    cos^2(theta_1) = (1 - q^2) cos^2(theta), beta J_1 = -log(tan(theta_1/2))/2.
    """
    if not 0.0 < q < 1.0:
        raise DomainError("q must lie in (0, 1)")
    theta = math.atan(q)
    theta1 = math.acos(math.sqrt(1.0 - q * q) * math.cos(theta))
    return theta1, 2.0 * float(coupling_from_theta(theta1))


def wetting_jacobi(model: WettingModel, N: int):
    """(b, a) of J for this model: b_1 = (1-r) a / q^2, a_1 = (1-r)^{1/2} a, b_k = 1-2a, a_k = a."""
    a, r, q2 = model.a, model.r, model.q**2
    b = np.full(N, 1.0 - 2.0 * a)
    off = np.full(N - 1, a)
    b[0] = (1.0 - r) * a / q2
    off[0] = math.sqrt(1.0 - r) * a
    return b, off


def generalized_eigenfunction(model: WettingModel, zeta: complex, K: int):
    """psi_k(zeta) = rho_k^{-1} (zeta^k - xi(zeta) zeta^{-k}), k = 0..K-1, and lambda(zeta).

    rho_0 = (1-r)^{1/2}, rho_k = 1 otherwise; lambda = 1 - a(2 + zeta + 1/zeta).
    These solve (J - lambda) psi = 0 for J with signed off-diagonal -a_k.
    """
    k = np.arange(K)
    z = complex(zeta)
    xi = complex(model.xi(z)) if abs(z - model.zeta0) > 0 or not model.bound_state else 0.0
    psi = z**k - xi * z ** (-k.astype(float))
    psi[0] /= math.sqrt(1.0 - model.r)
    lam = 1.0 - model.a * (2.0 + z + 1.0 / z)
    return psi, lam
