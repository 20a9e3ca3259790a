"""Finite-strip ground truth: exact transfer matrices and brute-force enumeration.

Geometry of the pi/4-rotated grid.  Column c holds H spins at heights
2j + (c mod 2), j = 0..H-1, and each spin couples to the sites at heights
+-1 in the neighbouring columns.  Sites that fall outside the strip (height -1
in odd columns, height 2H in even columns) are fixed boundary spins, as are
all of column 0 and column W.  The gap between columns p-1 and p carries
beta J_p = -log(tan(theta_p / 2)) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core.angles import check_angle
from .errors import DomainError, SizeError

MAX_TRANSFER_H = 14
MAX_ENUM_SPINS = 24
ENUM_CHUNK = 1 << 18


@dataclass(frozen=True)
class StripSpec:
    """Strip of columns 0..W with per-gap angles theta_1..theta_W.

    Attributes
    ----------
    thetas : tuple of float
        theta_p for the gap between columns p-1 and p.
    H : int
        Spins per column.
    boundary : int
        +1 or -1; the value of every fixed spin.
    """

    thetas: tuple
    H: int
    boundary: int = 1

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(check_angle(float(t), i + 1)
                                                 for i, t in enumerate(self.thetas)))
        if self.W < 2:
            raise DomainError("strip needs W >= 2 (at least one free column)")
        if self.H < 1:
            raise DomainError("H must be >= 1")
        if self.boundary not in (1, -1):
            raise DomainError("boundary must be +1 or -1")

    @classmethod
    def homogeneous(cls, theta: float, W: int, H: int, boundary: int = 1) -> "StripSpec":
        return cls((theta,) * W, H, boundary)

    @property
    def W(self) -> int:
        return len(self.thetas)

    @property
    def couplings(self) -> np.ndarray:
        """beta J_1..beta J_W."""
        return -0.5 * np.log(np.tan(0.5 * np.asarray(self.thetas)))

    @property
    def free_spins(self) -> int:
        return (self.W - 1) * self.H

    def flipped(self) -> "StripSpec":
        return StripSpec(self.thetas, self.H, -self.boundary)


def _check_site(spec: StripSpec, column: int, row: int | None) -> int:
    if not 0 < column < spec.W:
        raise DomainError(f"column must be a free column 1..{spec.W - 1}")
    row = spec.H // 2 if row is None else row
    if not 0 <= row < spec.H:
        raise DomainError(f"row must lie in 0..{spec.H - 1}")
    return row


# ---------------------------------------------------------------- enumeration

def _bonds(spec: StripSpec):
    """Bond list over free spins (i, j, K) and boundary fields h_i.

    Free spin (c, j), 1 <= c <= W-1, has index (c-1)*H + j.
    """
    H, W, b = spec.H, spec.W, spec.boundary
    K = spec.couplings
    idx = lambda c, j: (c - 1) * H + j  # noqa: E731
    pairs, field = [], np.zeros(spec.free_spins)
    for c in range(W):
        k = K[c]  # gap between c and c+1
        for j in range(H):
            # neighbours of (c, j) in column c+1; jn out of range is the ghost of column c+1
            nbrs = (j, j - 1) if c % 2 == 0 else (j, j + 1)
            for jn in nbrs:
                left_fixed = c == 0
                right_fixed = c + 1 == W or not 0 <= jn < H
                if left_fixed and right_fixed:
                    continue
                if left_fixed:
                    field[idx(c + 1, jn)] += k * b
                elif right_fixed:
                    field[idx(c, j)] += k * b
                else:
                    pairs.append((idx(c, j), idx(c + 1, jn), k))
        if 0 < c + 1 < W:
            # ghost of column c (top of even, bottom of odd) meets column c+1
            field[idx(c + 1, H - 1 if c % 2 == 0 else 0)] += k * b
    return pairs, field


def enumerate_magnetization(spec: StripSpec, column: int, row: int | None = None) -> float:
    """<sigma_(column,row)> by summing over every free-spin configuration."""
    n = spec.free_spins
    if n > MAX_ENUM_SPINS:
        raise SizeError(f"{n} free spins exceed the enumeration limit {MAX_ENUM_SPINS}")
    row = _check_site(spec, column, row)
    site = (column - 1) * spec.H + row
    pairs, field = _bonds(spec)
    pi = np.array([p[0] for p in pairs], dtype=np.int64)
    pj = np.array([p[1] for p in pairs], dtype=np.int64)
    pk = np.array([p[2] for p in pairs])
    total = 2**n
    # energies can be large; shift by the all-boundary configuration's energy
    e_ref = float(np.sum(pk) + np.sum(np.abs(field)))
    num = den = 0.0
    for start in range(0, total, ENUM_CHUNK):
        conf = np.arange(start, min(total, start + ENUM_CHUNK), dtype=np.int64)
        s = 1 - 2 * ((conf[:, None] >> np.arange(n)) & 1)
        e = s @ field
        if pk.size:
            e = e + (s[:, pi] * s[:, pj]) @ pk
        w = np.exp(e - e_ref)
        num += float(w @ s[:, site])
        den += float(np.sum(w))
    return num / den


# ------------------------------------------------------------ transfer matrix

def _spins(H: int) -> np.ndarray:
    idx = np.arange(2**H)
    return 1 - 2 * ((idx[None, :] >> np.arange(H)[:, None]) & 1)  # (H, 2^H)


def _step(v, K, up: bool, field_bit: int, b: int, spins):
    """Propagate a column vector across one gap of coupling K.

    New spin j couples to old spins j and j+1 (``up``) or j and j-1, a missing
    old neighbour being the fixed value b; ``field_bit`` is the old spin that
    meets the ghost site of the new column.
    """
    H = spins.shape[0]
    v = v * np.exp(K * b * spins[field_bit])
    order = range(H) if up else range(H - 1, -1, -1)
    for j in order:
        jn = j + 1 if up else j - 1
        shape = (2 ** (H - 1 - j), 2, 2**j)
        vv = v.reshape(shape)
        nb = (spins[jn] if 0 <= jn < H else np.full(2**H, b)).reshape(shape)[:, 0, :]
        v0, v1 = vv[:, 0, :], vv[:, 1, :]
        ep, em = np.exp(K * (1 + nb)), np.exp(K * (-1 + nb))
        out = np.empty_like(vv)
        out[:, 0, :] = v0 * ep + v1 * em
        out[:, 1, :] = v0 / ep + v1 / em
        v = out.reshape(-1)
    return v / np.max(v)


def transfer_matrix_magnetization(spec: StripSpec, column: int, row: int | None = None) -> float:
    """<sigma_(column,row)> from left and right partial transfer products."""
    H = spec.H
    if H > MAX_TRANSFER_H:
        raise SizeError(f"H = {H} exceeds the transfer-matrix limit {MAX_TRANSFER_H}")
    row = _check_site(spec, column, row)
    K, b = spec.couplings, spec.boundary
    spins = _spins(H)
    fixed = np.zeros(2**H)
    fixed[0 if b == 1 else 2**H - 1] = 1.0
    left = fixed
    for c in range(column):  # gap c -> c+1
        even = c % 2 == 0
        left = _step(left, K[c], up=even, field_bit=0 if even else H - 1, b=b, spins=spins)
    right = fixed
    for c in range(spec.W - 1, column - 1, -1):  # gap c+1 -> c
        even = c % 2 == 0
        right = _step(right, K[c], up=not even, field_bit=H - 1 if even else 0, b=b, spins=spins)
    w = left * right
    return float(w @ spins[row] / np.sum(w))


@dataclass(frozen=True)
class ConvergenceRow:
    H: int
    W: int
    value: float
    error: float | None


def convergence_table(thetas_or_theta, m: int, H_values=(6, 8, 10, 12), W: int = 20,
                      reference: float | None = None) -> list[ConvergenceRow]:
    """Strip values at column 2m for growing H (homogeneous when given a scalar)."""
    rows = []
    for H in H_values:
        if np.ndim(thetas_or_theta) == 0:
            spec = StripSpec.homogeneous(float(thetas_or_theta), W, H)
        else:
            spec = StripSpec(tuple(thetas_or_theta)[:W], H)
        v = transfer_matrix_magnetization(spec, 2 * m)
        rows.append(ConvergenceRow(H, spec.W, v, None if reference is None else abs(v - reference)))
    return rows


def is_monotone(rows) -> bool:
    err = [r.error for r in rows]
    return all(a > b for a, b in zip(err, err[1:]))


def coupling_from_x(x: float) -> float:
    """beta J from x = tan(theta/2) = exp(-2 beta J)."""
    if not 0 < x < 1:
        raise DomainError("x must lie in (0, 1)")
    return -0.5 * math.log(x)
