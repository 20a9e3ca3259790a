import math
from fractions import Fraction

import pytest

from zigzag_ising import DomainError, SizeError
from zigzag_ising.exact import (
    diagonal_asymptotics_check,
    half_integer_identity,
    legendre_spinor,
    spinor_laplacian_residuals,
    wu_diagonal,
    wu_rational,
    zigzag_magnetization_exact,
    zigzag_magnetization_ratio,
    zigzag_rational,
)


def test_wu_values():
    assert wu_diagonal(0) == 1.0
    assert wu_diagonal(1) == pytest.approx(2 / math.pi, rel=1e-15)
    assert wu_diagonal(2) == pytest.approx(16 / (3 * math.pi**2), rel=1e-15)


def test_zigzag_values():
    assert zigzag_magnetization_exact(0) == 1.0
    assert zigzag_magnetization_exact(1) == pytest.approx(8 / (3 * math.pi), rel=1e-15)
    assert zigzag_magnetization_exact(2) == pytest.approx(36864 / (4725 * math.pi**2), rel=1e-15)


@pytest.mark.parametrize("m", range(0, 25))
def test_ratio_and_direct_forms(m):
    assert zigzag_magnetization_ratio(m) == pytest.approx(zigzag_magnetization_exact(m), rel=1e-13)
    r = zigzag_magnetization_exact(m + 1) / zigzag_magnetization_exact(m)
    assert r == pytest.approx(wu_diagonal(2 * m + 2) / wu_diagonal(2 * m + 1), rel=1e-13)


@pytest.mark.parametrize("n", range(0, 21))
def test_rational_parts(n):
    # D_n = (2/pi)^n R_n and M_m = (2/pi)^m R'_m with exact rationals R
    assert isinstance(wu_rational(n), Fraction)
    assert float(wu_rational(n)) * (2 / math.pi) ** n == pytest.approx(wu_diagonal(n), rel=1e-13)
    assert float(zigzag_rational(n)) * (2 / math.pi) ** n == pytest.approx(zigzag_magnetization_exact(n), rel=1e-13)


def test_half_integer_identity():
    assert half_integer_identity(-1) == math.sqrt(2)
    assert half_integer_identity(0) == pytest.approx(2 * math.sqrt(2) / math.pi, rel=1e-15)
    assert half_integer_identity(1) == pytest.approx(math.sqrt(2) * wu_diagonal(3) / zigzag_magnetization_exact(1))
    # M_{1/2}/M_{-1/2} = D_1/D_0
    assert half_integer_identity(0) / half_integer_identity(-1) == pytest.approx(wu_diagonal(1))
    for m in range(1, 15):
        chain = half_integer_identity(m) / half_integer_identity(m - 1)
        assert chain == pytest.approx(wu_diagonal(2 * m + 1) / wu_diagonal(2 * m), rel=1e-13)
    with pytest.raises(DomainError):
        half_integer_identity(-2)


def test_diagonal_asymptotics():
    d, m = diagonal_asymptotics_check(1000)
    assert 0.999 <= d <= 1.001 and 0.999 <= m <= 1.001
    d2, m2 = diagonal_asymptotics_check(2000)
    d5, m5 = diagonal_asymptotics_check(500)
    assert abs(d2 - 1) < abs(d5 - 1) and abs(m2 - 1) < abs(m5 - 1)
    with pytest.raises(DomainError):
        diagonal_asymptotics_check(5)


# ---------------------------------------------------------------- spinor

@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_spinor_normalization_and_support(n):
    f = legendre_spinor(n, n + 6, 6)
    assert f(n, 0) == pytest.approx(wu_diagonal(n), rel=1e-12)
    assert f(-n, 0) == pytest.approx(wu_diagonal(n), rel=1e-12)
    for k in range(n + 2, n + 7, 2):
        assert abs(f(k, 0)) <= 1e-10 and abs(f(-k, 0)) <= 1e-10
    for k in range(-f.K, f.K + 1):
        for s in range(f.S + 1):
            assert f(k, s) == pytest.approx(f(-k, s), abs=1e-14)
            if (k + s + n) % 2:
                assert f(k, s) == 0.0


def test_spinor_decay_in_s():
    f = legendre_spinor(2, 6, 12)
    for k in range(-6, 7):
        # off the support V(k, 0) = 0 and |V| first grows up to s ~ |k|
        start = 0 if abs(k) <= 2 else abs(k)
        vals = [abs(f(k, s)) for s in range(start, f.S + 1) if (k + s) % 2 == 0]
        assert all(b <= a + 1e-14 for a, b in zip(vals, vals[1:]))


def test_spinor_harmonicity_n2():
    res = spinor_laplacian_residuals(legendre_spinor(2, 7, 6))
    assert res["interior"] <= 1e-10
    assert res["branch_plus"] == pytest.approx(-0.5 * wu_diagonal(3), abs=1e-8)
    assert res["branch_minus"] == pytest.approx(-0.5 * wu_diagonal(3), abs=1e-8)


@pytest.mark.parametrize("n", [1, 3, 4])
def test_spinor_branch_values(n):
    res = spinor_laplacian_residuals(legendre_spinor(n, n + 5, 6))
    assert res["interior"] <= 1e-10
    assert res["branch_plus"] == pytest.approx(-0.5 * wu_diagonal(n + 1), abs=1e-8)


def test_spinor_n0():
    res = spinor_laplacian_residuals(legendre_spinor(0, 5, 5))
    assert res["branch_plus"] == pytest.approx(-2 / math.pi, abs=1e-8)
    with pytest.raises(SizeError):
        legendre_spinor(3, 4, 5)
