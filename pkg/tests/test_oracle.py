import math

import numpy as np
import pytest

from zigzag_ising import DomainError, SizeError
from zigzag_ising.core import AngleSequence
from zigzag_ising.layered import magnetization
from zigzag_ising.oracle import (
    StripSpec,
    convergence_table,
    coupling_from_x,
    enumerate_magnetization,
    is_monotone,
    transfer_matrix_magnetization,
)

P6 = math.pi / 6


def test_single_free_spin_is_tanh():
    s = StripSpec((0.5, 0.9), 1)
    # four fixed neighbours: two across each gap
    ref = math.tanh(2 * s.couplings.sum())
    assert enumerate_magnetization(s, 1) == pytest.approx(ref, rel=1e-14)
    assert transfer_matrix_magnetization(s, 1) == pytest.approx(ref, rel=1e-14)


def test_strong_coupling_limit():
    vals = [enumerate_magnetization(StripSpec.homogeneous(t, 4, 2), 2) for t in (0.8, 0.3, 0.05)]
    assert vals[0] < vals[1] < vals[2] and vals[2] > 1 - 1e-5


@pytest.mark.parametrize("seed", range(4))
def test_transfer_matrix_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    spec = StripSpec(tuple(rng.uniform(0.2, 1.4, 4)), 3)
    for col in range(1, 4):
        for row in range(3):
            a = enumerate_magnetization(spec, col, row)
            b = transfer_matrix_magnetization(spec, col, row)
            assert abs(a - b) <= 1e-12


def test_three_by_three_block():
    spec = StripSpec((0.4, 0.7, 1.1, 0.6), 3)
    assert spec.free_spins == 9
    assert abs(enumerate_magnetization(spec, 2) - transfer_matrix_magnetization(spec, 2)) <= 1e-12


def test_spin_flip_covariance():
    spec = StripSpec((0.4, 0.9, 1.2, 0.6, 0.8), 4)
    for f in (enumerate_magnetization, transfer_matrix_magnetization):
        # exact up to the summation order
        assert f(spec.flipped(), 2) == pytest.approx(-f(spec, 2), abs=1e-14)


def test_convergence_to_half_plane_value():
    ref = magnetization(AngleSequence.homogeneous(P6), 1).value
    rows = convergence_table(P6, 1, reference=ref)
    assert [r.H for r in rows] == [6, 8, 10, 12]
    assert rows[-1].error <= 1e-2
    assert is_monotone(rows)


def test_width_saturation():
    a = transfer_matrix_magnetization(StripSpec.homogeneous(P6, 20, 8), 2)
    b = transfer_matrix_magnetization(StripSpec.homogeneous(P6, 30, 8), 2)
    assert abs(a - b) < 1e-6


def test_size_and_domain_errors():
    with pytest.raises(SizeError):
        enumerate_magnetization(StripSpec.homogeneous(P6, 6, 5), 2)
    with pytest.raises(SizeError):
        transfer_matrix_magnetization(StripSpec.homogeneous(P6, 4, 15), 2)
    with pytest.raises(DomainError):
        transfer_matrix_magnetization(StripSpec.homogeneous(P6, 4, 3), 4)
    with pytest.raises(DomainError):
        StripSpec((P6,), 3)
    with pytest.raises(DomainError):
        StripSpec((P6, 2.0), 3)
    with pytest.raises(DomainError):
        coupling_from_x(1.5)
    assert coupling_from_x(math.tan(0.3)) == pytest.approx(StripSpec((0.6, 0.6), 1).couplings[0])
