import math

import numpy as np
import pytest

from zigzag_ising import ConvergenceError, DomainError, PreconditionError, SizeError
from zigzag_ising.core import AngleSequence, build_jacobi, tridiagonal_eigvalsh
from zigzag_ising.exact import zigzag_magnetization_exact
from zigzag_ising.layered import (
    cj_constant,
    ground_vector,
    ids_empirical,
    kernel_residual_homogeneous,
    magnetization,
    magnetization_at,
    periodic_coefficients,
    periodic_criticality,
    periodic_matrix,
    periodic_spectral_data,
    twisted_lowest_eigenvalue,
)

CRIT = AngleSequence.homogeneous(math.pi / 4)


# ------------------------------------------------------------ magnetization

@pytest.mark.parametrize("method", ["hankel", "sqrt", "polar"])
def test_critical_closed_forms(method):
    assert magnetization(CRIT, 1, method).value == pytest.approx(8 / (3 * math.pi), rel=1e-7)
    assert magnetization(CRIT, 2, method).value == pytest.approx(36864 / (4725 * math.pi**2), rel=1e-7)


def test_m_zero_is_one():
    r = magnetization(AngleSequence.explicit([0.3, 1.2, 0.7]), 0, "polar")
    assert r.value == 1.0 and r.N == 0


@pytest.mark.parametrize("m", [3, 5, 8])
def test_matches_exact_factorials(m):
    assert magnetization(CRIT, m).value == pytest.approx(zigzag_magnetization_exact(m), rel=1e-7)


def test_subcritical_homogeneous_is_bulk_value_deep_inside():
    # far from the boundary the column value approaches the bulk magnetization
    th = math.pi / 6
    bulk = (1 - math.tan(th) ** 4) ** 0.125
    v = magnetization(AngleSequence.homogeneous(th), 12).value
    assert abs(v - bulk) < 1e-6
    assert v > bulk  # the + boundary raises the column value


def test_methods_agree_on_random_sequences():
    rng = np.random.default_rng(99)
    for _ in range(4):
        ang = AngleSequence.explicit(rng.uniform(0.2, 1.4, 30), tail=float(rng.uniform(0.2, 1.3)))
        m = int(rng.integers(1, 6))
        v = [magnetization(ang, m, k).value for k in ("hankel", "sqrt", "polar")]
        assert max(v) - min(v) <= 1e-7 * max(v)
        assert 0 < v[1] <= 1


def test_finite_truncations_agree_at_each_N():
    ang = AngleSequence.periodic([0.4, 0.9, 0.6, 1.1])
    for N in (16, 40):
        v = [magnetization_at(ang, 3, N, k) for k in ("hankel", "sqrt", "polar")]
        assert max(v) - min(v) < 1e-10


def test_explicit_list_exhaustion_and_errors():
    short = AngleSequence.explicit([0.5] * 9)
    r = magnetization(short, 2)
    assert r.N <= 4 and 0 < r.value <= 1
    with pytest.raises(SizeError):
        magnetization(AngleSequence.explicit([0.5] * 3), 2)
    with pytest.raises(DomainError):
        magnetization(CRIT, 1, "qr")
    with pytest.raises(DomainError):
        magnetization(CRIT, 13, "hankel")
    with pytest.raises(DomainError):
        magnetization(CRIT, -1)


def test_nonconvergence_carries_iterates():
    with pytest.raises(ConvergenceError) as exc:
        magnetization(CRIT, 2, tol=1e-15, N_max=256)
    assert len(exc.value.iterates) == 2


def test_supercritical_decay():
    th = 0.3 * math.pi
    a = AngleSequence.homogeneous(th)
    vals = [magnetization(a, m, "polar").value for m in range(5, 8)]
    cot2 = 1 / math.tan(th) ** 2
    for u, v in zip(vals, vals[1:]):
        assert v / u <= cot2 + 0.05
    # geometric decay from M_1 ~ 0.51 puts M_6 near 0.021
    assert magnetization(a, 6, "polar").value < 0.05


# ------------------------------------------------------------------ kernel

@pytest.mark.parametrize("theta,N", [(0.3 * math.pi, 64), (0.4 * math.pi, 32)])
def test_kernel_residual(theta, N):
    assert kernel_residual_homogeneous(theta, N) <= 1e-12


def test_kernel_residual_domain():
    with pytest.raises(DomainError):
        kernel_residual_homogeneous(math.pi / 4, 10)


def test_criticality_and_spectrum_at_zero():
    crit = np.array([0.4, 0.9, math.atan(1 / (math.tan(0.4) * math.tan(0.9) * math.tan(1.0))), 1.0])
    assert periodic_criticality(crit)[1]
    off = np.array([0.4, 0.9, 0.6, 1.0])
    low = {}
    for name, blk in (("crit", crit), ("off", off)):
        seq = AngleSequence.periodic(blk)
        low[name] = [tridiagonal_eigvalsh(build_jacobi(seq, N).diag, build_jacobi(seq, N).offdiag)[0]
                     for N in (100, 400)]
    # critical: lowest eigenvalue ~ N^-2; non-critical: bounded below
    assert low["crit"][1] < low["crit"][0] / 8
    assert low["off"][1] > 0.5 * low["off"][0] > 1e-3


# ----------------------------------------------------------------- periodic

def test_periodic_criticality_examples():
    assert periodic_criticality([math.pi / 4] * 2) == (pytest.approx(1.0), True)
    p, c = periodic_criticality([math.pi / 6, math.pi / 3])
    assert c and p == pytest.approx(1.0)
    p, c = periodic_criticality([math.pi / 6] * 2)
    assert not c and p == pytest.approx(1 / 3)
    with pytest.raises(SizeError):
        periodic_criticality([0.3, 0.4, 0.5])


def test_ground_vector_examples():
    assert np.allclose(ground_vector([math.pi / 4] * 2), math.sqrt(2))
    assert np.allclose(ground_vector([math.pi / 6, math.pi / 3]), 2.0)
    with pytest.raises(PreconditionError):
        ground_vector([math.pi / 6] * 2)


def _critical_block(rng, n):
    free = rng.uniform(0.3, 1.2, 2 * n - 1)
    last = math.atan(1 / np.prod(np.tan(free)))
    return np.append(free, last)


def test_ground_vector_is_null_vector():
    blk = _critical_block(np.random.default_rng(5), 2)
    psi = ground_vector(blk)
    M = periodic_matrix(blk, 3)
    v = np.tile(psi[:2], 3)
    assert np.max(np.abs(M @ v)) <= 1e-12
    assert psi[-1] == pytest.approx(psi[0], rel=1e-12)


def test_cj_constant_examples_and_invariance():
    assert cj_constant([math.pi / 4] * 2) == pytest.approx(2.0, rel=1e-14)
    assert cj_constant([math.pi / 6, math.pi / 3]) == pytest.approx(4 / math.sqrt(3), rel=1e-14)
    blk = _critical_block(np.random.default_rng(8), 3)
    c = cj_constant(blk)
    assert cj_constant(blk, 7 * ground_vector(blk)) == pytest.approx(c, rel=1e-14)
    assert cj_constant(np.roll(blk, 2)) == pytest.approx(c, rel=1e-12)
    d = periodic_spectral_data(blk)
    assert d.n == 3 and d.cj == c and d.tan_product == pytest.approx(1.0)


@pytest.mark.parametrize("block,target,rel", [
    ([math.pi / 4] * 2, 2.0, 0.02),
    ([math.pi / 6, math.pi / 3], 4 / math.sqrt(3), 0.02),
])
def test_ids_slope(block, target, rel):
    r = ids_empirical(block, 512)
    assert r.slope == pytest.approx(target, rel=rel)
    full = ids_empirical(block, 64, lam_grid=np.linspace(0.01, 1.0, 100))
    assert full.ids[-1] >= 1 - 1 / full.size


def test_twisted_eigenvalue():
    blk = [math.pi / 4] * 2
    assert twisted_lowest_eigenvalue(blk, 0.0) <= 1e-12
    t = 0.01
    assert twisted_lowest_eigenvalue(blk, t) / t**2 == pytest.approx(0.25, rel=1e-3)
    blk = [math.pi / 6, math.pi / 3]
    assert twisted_lowest_eigenvalue(blk, 0.3) == pytest.approx(twisted_lowest_eigenvalue(blk, -0.3), abs=1e-15)
    target = (1 * cj_constant(blk)) ** -2
    assert twisted_lowest_eigenvalue(blk, 1e-3) / 1e-6 == pytest.approx(target, rel=1e-3)
    with pytest.raises(DomainError):
        twisted_lowest_eigenvalue(blk, 4.0)


def test_periodic_coefficients_wrap():
    b, a = periodic_coefficients([0.3, 0.5, 0.7, 0.9])
    assert b.size == a.size == 2
    assert a[-1] == pytest.approx(math.cos(0.7) * math.cos(0.9) * math.sin(0.9) * math.sin(0.3))
