"""Homogeneous square lattice off criticality: OPUC data of the circle weights.

The weight

    w(t) = [(1 - sin(th) cos(tv) cos t)^2 - (cos(th) sin(tv))^2]^{1/2}

and its reciprocal w# = 1/w generate Verblunsky coefficients alpha_k and norms
beta_k.  Products of the norms telescope into D_{2m+1}^2 - D*_{2m+1}^2, whose
limit is the fourth power of the spontaneous magnetization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core.angles import check_angle
from .errors import ConditioningError, ConvergenceError, DomainError, IntegrabilityError

LEVINSON_GUARD = 1e-13
FOURIER_TOL = 1e-13
FOURIER_MAX_POINTS = 2**22
CRITICAL_GAP = 1e-12


def _pair(theta_h: float, theta_v: float):
    return check_angle(theta_h, "h"), check_angle(theta_v, "v")


@dataclass(frozen=True)
class CircleWeight:
    """w(t; theta_h, theta_v), or its reciprocal when ``dual`` is set."""

    theta_h: float
    theta_v: float
    dual: bool = False
    scale: float = 1.0

    def __post_init__(self):
        _pair(self.theta_h, self.theta_v)
        if self.dual and abs(self.theta_h + self.theta_v - 0.5 * math.pi) <= CRITICAL_GAP:
            raise IntegrabilityError("w# is not integrable when theta_h + theta_v = pi/2")

    def base(self, t):
        t = np.asarray(t, dtype=float)
        sh, ch = math.sin(self.theta_h), math.cos(self.theta_h)
        sv, cv = math.sin(self.theta_v), math.cos(self.theta_v)
        # difference of squares, factored to avoid cancellation
        u = 1.0 - sh * cv * np.cos(t)
        return np.sqrt(np.clip((u - ch * sv) * (u + ch * sv), 0.0, None))

    def __call__(self, t):
        w = self.base(t)
        return self.scale * (1.0 / w if self.dual else w)

    @property
    def q_squared(self):
        """(q_-^2, q_+^2) with q_pm^2 = tan(th/2) tan(pi/4 -+ tv/2)."""
        th2 = math.tan(0.5 * self.theta_h)
        return (th2 * math.tan(0.25 * math.pi - 0.5 * self.theta_v),
                th2 * math.tan(0.25 * math.pi + 0.5 * self.theta_v))

    @property
    def C(self) -> float:
        return math.cos(0.5 * self.theta_h) ** 2 * math.cos(self.theta_v)

    def factorized(self, t):
        """C |1 - q_-^2 e^{it}| |1 - q_+^2 e^{it}| (equals :meth:`base`)."""
        qm, qp = self.q_squared
        z = np.exp(1j * np.asarray(t, dtype=float))
        return self.C * np.abs(1 - qm * z) * np.abs(1 - qp * z)


def weight_fourier_moments(weight, S: int, tol: float = FOURIER_TOL) -> np.ndarray:
    """c_0..c_S with c_s = (2 pi)^{-1} int e^{-ist} w(t) dt, for an even real weight.

    Uniform trapezoid rule (via the FFT), doubled until every coefficient
    changes by at most ``tol`` relative to c_0.
    """
    if S < 0:
        raise DomainError("S must be >= 0")
    M = max(256, 1 << int(math.ceil(math.log2(4 * (S + 1)))))
    prev = None
    while M <= FOURIER_MAX_POINTS:
        t = 2.0 * math.pi * np.arange(M) / M
        c = np.fft.rfft(weight(t)).real / M
        c = c[: S + 1] if c.size > S else np.pad(c, (0, S + 1 - c.size))
        if prev is not None and np.max(np.abs(c - prev)) <= tol * abs(c[0]):
            return c
        prev = c
        M *= 2
    raise ConvergenceError("Fourier moments did not stabilize", iterates=(prev,))


@dataclass(frozen=True)
class OPUCState:
    """Verblunsky coefficients alpha_0..alpha_{n-1} and norms beta_0..beta_n."""

    alpha: np.ndarray
    beta: np.ndarray


def verblunsky(c, n: int) -> OPUCState:
    """Szegő recursion for the real symmetric moment sequence c_0..c_n.

    Phi_{k+1} = z Phi_k - alpha_k Phi_k^*, alpha_k = sum_j phi_k[j] c_{j+1} / beta_k,
    beta_{k+1} = beta_k (1 - alpha_k^2), beta_0 = c_0.
    """
    c = np.asarray(c, dtype=float)
    if c.size < n + 1:
        raise DomainError(f"need moments c_0..c_{n}, got {c.size}")
    if c[0] <= 0:
        raise ConditioningError("c_0 must be positive", step=0)
    alpha = np.empty(n)
    beta = np.empty(n + 1)
    beta[0] = c[0]
    phi = np.array([1.0])  # coefficients of Phi_k, constant term first
    for k in range(n):
        a = float(phi @ c[1 : k + 2]) / beta[k]
        gap = 1.0 - a * a
        if gap < LEVINSON_GUARD:
            raise ConditioningError(f"Levinson pivot collapsed: 1 - alpha^2 = {gap:.3e}", step=k)
        alpha[k] = a
        beta[k + 1] = beta[k] * gap
        nxt = np.zeros(k + 2)
        nxt[1:] = phi
        nxt[:-1] -= a * phi[::-1]
        phi = nxt
    return OPUCState(alpha, beta)


def opuc_pair(theta_h: float, theta_v: float, n: int, scale: float = 1.0):
    """OPUC states of w and w# up to index n."""
    w = CircleWeight(theta_h, theta_v, False, scale)
    wd = CircleWeight(theta_h, theta_v, True, 1.0 / scale)
    return (verblunsky(weight_fourier_moments(w, n), n),
            verblunsky(weight_fourier_moments(wd, n), n))


def _require_subcritical(theta_h, theta_v):
    theta_h, theta_v = _pair(theta_h, theta_v)
    if theta_h + theta_v >= 0.5 * math.pi:
        raise DomainError("subcritical regime requires theta_h + theta_v < pi/2")
    return theta_h, theta_v


@dataclass(frozen=True)
class SubcriticalProducts:
    """D_{2m+1}^2 - D*_{2m+1}^2 for m = 0..m_max."""

    values: np.ndarray
    L0: float
    L0_star: float

    @property
    def limit(self) -> float:
        return float(self.values[-1])


def szego_partial_products(theta_h, theta_v, m_max: int, scale: float = 1.0) -> np.ndarray:
    """prod_{k<=2m+1} beta#_k * prod_{k<=2m-1} beta_k for m = 0..m_max (tends to C^-2 G^2)."""
    theta_h, theta_v = _require_subcritical(theta_h, theta_v)
    n = 2 * m_max + 1
    st, sd = opuc_pair(theta_h, theta_v, n, scale)
    logb = np.log(st.beta)
    logbd = np.log(sd.beta)
    cb = np.concatenate(([0.0], np.cumsum(logb)))   # cb[j] = sum_{k<j} log beta_k
    cbd = np.concatenate(([0.0], np.cumsum(logbd)))
    m = np.arange(m_max + 1)
    return np.exp(cbd[2 * m + 2] + cb[2 * m])


def subcritical_product(theta_h: float, theta_v: float, m_max: int, scale: float = 1.0) -> SubcriticalProducts:
    """Telescoped D^2_{2m+1} - D*^2_{2m+1} = prod beta# prod beta (L0^2 - L0*^2).

    L0 = cos(theta_v), L0* = sin(theta_h).  ``scale`` multiplies w (and
    divides w#); the products then scale by scale^-2.
    """
    theta_h, theta_v = _require_subcritical(theta_h, theta_v)
    L0, L0s = math.cos(theta_v), math.sin(theta_h)
    prods = szego_partial_products(theta_h, theta_v, m_max, scale)
    return SubcriticalProducts(prods * (L0 * L0 - L0s * L0s), L0, L0s)


def koy_magnetization(theta_h: float, theta_v: float) -> float:
    """M = [1 - (tan th tan tv)^2]^{1/8}."""
    theta_h, theta_v = _pair(theta_h, theta_v)
    p = math.tan(theta_h) * math.tan(theta_v)
    if p >= 1.0:
        raise DomainError("closed form holds only below criticality (tan th tan tv < 1)")
    return (1.0 - p * p) ** 0.125


def koy_magnetization_k(theta_h: float, theta_v: float) -> float:
    """Same value as k^{1/4} with k^2 = 1 - (tan th tan tv)^2."""
    theta_h, theta_v = _pair(theta_h, theta_v)
    p = math.tan(theta_h) * math.tan(theta_v)
    if p >= 1.0:
        raise DomainError("closed form holds only below criticality")
    return math.sqrt(math.sqrt(math.sqrt(1.0 - p * p)))


def szego_G(theta_h: float, theta_v: float) -> float:
    """G = [(1 - q_-^4)(1 - q_+^4)(1 - q_-^2 q_+^2)^2]^{-1/4}."""
    theta_h, theta_v = _require_subcritical(theta_h, theta_v)
    qm, qp = CircleWeight(theta_h, theta_v).q_squared
    return ((1 - qm * qm) * (1 - qp * qp) * (1 - qm * qp) ** 2) ** -0.25


def szego_G_trig(theta_h: float, theta_v: float) -> float:
    theta_h, theta_v = _require_subcritical(theta_h, theta_v)
    return (math.cos(0.5 * theta_h) ** 2 * math.sqrt(math.cos(theta_v) / math.cos(theta_h))
            * (math.cos(theta_h + theta_v) * math.cos(theta_h - theta_v)) ** -0.25)


def szego_G_series(theta_h: float, theta_v: float, terms: int | None = None) -> float:
    """exp[+sum_k (q_-^{2k} + q_+^{2k})^2 / (4k)], summed until negligible."""
    theta_h, theta_v = _require_subcritical(theta_h, theta_v)
    qm, qp = CircleWeight(theta_h, theta_v).q_squared
    total, k = 0.0, 1
    while True:
        term = (qm**k + qp**k) ** 2 / (4 * k)
        total += term
        if (terms is not None and k >= terms) or (terms is None and term < 1e-18 * max(total, 1.0)):
            break
        k += 1
    return math.exp(total)


def _adaptive_moment(weight, s: int) -> float:
    import warnings

    from scipy.integrate import IntegrationWarning, quad

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(lambda t: math.cos(s * t) * float(weight(t)), 0.0, math.pi,
                      points=[0.0], limit=400, epsabs=0.0, epsrel=1e-13)
    return val / math.pi


def energy_density(theta_h: float, theta_v: float) -> float:
    """D_1 = beta#_0 [cos tv - alpha#_0 sin th] (energy density on a vertical edge)."""
    theta_h, theta_v = _pair(theta_h, theta_v)
    wd = CircleWeight(theta_h, theta_v, dual=True)
    try:
        c = weight_fourier_moments(wd, 1)
    except ConvergenceError:
        # near the critical line w# has a sharp peak at t = 0
        c = np.array([_adaptive_moment(wd, s) for s in (0, 1)])
    st = verblunsky(c, 1)
    return float(st.beta[0] * (math.cos(theta_v) - st.alpha[0] * math.sin(theta_h)))
