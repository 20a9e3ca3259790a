import math

import numpy as np
import pytest
from scipy.special import ellipk

from zigzag_ising import ConditioningError, DomainError, IntegrabilityError
from zigzag_ising.homogeneous import (
    CircleWeight,
    energy_density,
    koy_magnetization,
    koy_magnetization_k,
    opuc_pair,
    subcritical_product,
    szego_G,
    szego_G_series,
    szego_G_trig,
    szego_partial_products,
    verblunsky,
    weight_fourier_moments,
)

P6 = math.pi / 6


def onsager_energy(theta):
    """Nearest-neighbour <s s> of the isotropic square lattice, K = -log(tan(theta/2))/2."""
    K = -0.5 * math.log(math.tan(0.5 * theta))
    t = math.tanh(2 * K)
    k1 = 2 * math.sinh(2 * K) / math.cosh(2 * K) ** 2
    return 0.5 / t * (1 + 2 / math.pi * (2 * t * t - 1) * ellipk(k1 * k1))


# ----------------------------------------------------------------- weights

def test_flat_weight_moments_and_verblunsky():
    c = weight_fourier_moments(lambda t: np.ones_like(t), 5)
    assert c[0] == pytest.approx(1.0) and np.allclose(c[1:], 0, atol=1e-15)
    st = verblunsky(c, 5)
    assert np.allclose(st.alpha, 0) and np.allclose(st.beta, 1)


@pytest.mark.parametrize("th,tv", [(P6, P6), (0.2, 1.1), (1.0, 0.9)])
def test_weight_factorization(th, tv):
    w = CircleWeight(th, tv)
    t = np.linspace(-math.pi, math.pi, 97)
    assert np.allclose(w.base(t), w.factorized(t), rtol=0, atol=1e-12)
    assert np.all(w(t) >= 0) and np.allclose(w(t), w(-t))


def test_fourier_self_convergence():
    w = CircleWeight(P6, P6)
    a = weight_fourier_moments(w, 8)
    b = weight_fourier_moments(w, 8, tol=1e-15)
    assert abs(a[0] - b[0]) <= 1e-12


def test_dual_weight_not_integrable_at_criticality():
    with pytest.raises(IntegrabilityError):
        CircleWeight(0.6, math.pi / 2 - 0.6, dual=True)


def test_verblunsky_invariants():
    st, sd = opuc_pair(P6, P6, 40)
    for s in (st, sd):
        assert np.all(np.abs(s.alpha) < 1) and np.all(s.beta > 0)
        assert np.allclose(s.beta[1:] / s.beta[:-1], 1 - s.alpha**2, rtol=1e-12)
    assert st.beta[0] == pytest.approx(weight_fourier_moments(CircleWeight(P6, P6), 0)[0])


def test_levinson_guard():
    # moments of a two-point measure: the Toeplitz matrix becomes singular
    c = np.array([1.0, 1.0, 1.0, 1.0])
    with pytest.raises(ConditioningError) as exc:
        verblunsky(c, 3)
    assert exc.value.step == 0


# ----------------------------------------------------------------- products

def test_partial_products_reach_szego_constant():
    w = CircleWeight(P6, P6)
    target = w.C**-2 * szego_G(P6, P6) ** 2
    p = szego_partial_products(P6, P6, 100)
    assert p[-1] == pytest.approx(target, rel=1e-4)


def test_subcritical_product_limit():
    r = subcritical_product(P6, P6, 100)
    assert r.limit == pytest.approx(math.sqrt(8 / 9), abs=1e-3)
    assert r.L0**2 - r.L0_star**2 == pytest.approx(math.cos(2 * P6))
    # monotone approach from below
    assert np.all(np.diff(r.values) >= -1e-13)
    assert np.all(r.values > 0)


def test_subcritical_product_scale_covariance():
    a = subcritical_product(P6, P6, 20).values
    b = subcritical_product(P6, P6, 20, scale=3.0).values
    assert np.allclose(b, a / 9.0, rtol=1e-12)


@pytest.mark.parametrize("th,tv", [(0.2, 0.3), (P6, P6), (0.4, 0.9), (1.0, 0.3), (0.7, 0.6)])
def test_limit_is_fourth_power_of_koy(th, tv):
    v = subcritical_product(th, tv, 200).limit
    assert v**0.25 == pytest.approx(koy_magnetization(th, tv), abs=1e-3)


def test_subcritical_domain():
    with pytest.raises(DomainError):
        subcritical_product(0.8, 0.8, 5)


# --------------------------------------------------------------- closed forms

def test_koy_values():
    assert koy_magnetization(P6, P6) == pytest.approx((8 / 9) ** 0.125, rel=1e-15)
    assert koy_magnetization(1e-9, 1.0) == pytest.approx(1.0)
    for th in np.linspace(0.05, 0.7, 9):
        assert koy_magnetization_k(th, 0.6) == pytest.approx(koy_magnetization(th, 0.6), rel=1e-15)
    with pytest.raises(DomainError):
        koy_magnetization(0.8, 0.8)


def test_szego_forms():
    assert szego_G(P6, P6) == pytest.approx(szego_G_trig(P6, P6), rel=1e-13)
    assert szego_G_series(P6, P6) == pytest.approx(szego_G(P6, P6), rel=1e-12)
    # theta_h -> 0: q -> 0 and G -> 1
    assert szego_G(1e-8, 0.7) == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(DomainError):
        szego_G(1.0, 1.0)


# ------------------------------------------------------------ energy density

@pytest.mark.parametrize("theta", [0.3, P6, 0.7, 1.0, 1.3])
def test_energy_density_matches_onsager(theta):
    assert energy_density(theta, theta) == pytest.approx(onsager_energy(theta), abs=1e-12)


def test_energy_density_limits_and_range():
    assert 0 < energy_density(P6, P6) < 1
    assert energy_density(P6, 1e-5) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(IntegrabilityError):
        energy_density(0.5, math.pi / 2 - 0.5)


def test_energy_density_near_critical_line():
    th = math.pi / 4 - 1e-3
    assert energy_density(th, th) == pytest.approx(onsager_energy(th), abs=1e-8)
