"""Periodic s-embeddings of critical layered zig-zag lattices.

Column k carries two x-positions t•_k and t°_k with t°_k - t•_k = cot(2 phi_k).
Consecutive columns form tangential quads:

    t•_{k+1} - t°_k = (tan phi_{k+1} + tan phi_k) / 2
    t°_{k+1} - t•_k = (cot phi_{k+1} + cot phi_k) / 2

The slopes obey tan phi_{k+1} = tan^2(theta_{k+1}) tan phi_k, which is
2n-periodic exactly when the block is critical, and the balance
sum tan phi_k = sum cot phi_k fixes tan phi_0.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .layered import _block, cj_constant, periodic_criticality

RESIDUAL_TOL = 1e-12


def _critical_block(block) -> np.ndarray:
    th = _block(block)
    prod, crit = periodic_criticality(th)
    if not crit:
        raise PreconditionError(
            f"slopes are not periodic for a non-critical block (prod tan theta = {prod!r})")
    return th


def slope_residuals(block, phi) -> tuple[float, float]:
    """(max recurrence residual over one period incl. wrap-around, balance residual)."""
    th = _block(block)
    t = np.tan(np.asarray(phi, dtype=float))
    # phi_{k+1} uses theta_{k+1} = th[k]; the last step wraps phi_{2n} -> phi_0
    nxt = np.roll(t, -1)
    rec = np.abs(nxt - np.tan(th) ** 2 * t) / np.maximum(nxt, 1.0)
    bal = abs(np.sum(t) - np.sum(1.0 / t)) / np.sum(t)
    return float(np.max(rec)), float(bal)


def solve_slopes(block) -> np.ndarray:
    """phi_0..phi_{2n-1} in (0, pi/2) for a critical block theta_1..theta_{2n}.

    tan phi_k = tan phi_0 * P_k with P_k = prod_{p<=k} tan^2 theta_p, and
    tan^2 phi_0 = sum 1/P_k / sum P_k.
    """
    th = _critical_block(block)
    logP = np.concatenate(([0.0], np.cumsum(2.0 * np.log(np.tan(th[:-1])))))
    # log-sum-exp keeps extreme blocks finite
    lse = lambda v: float(v.max() + math.log(np.sum(np.exp(v - v.max()))))  # noqa: E731
    log_t0 = 0.5 * (lse(-logP) - lse(logP))
    phi = np.arctan(np.exp(log_t0 + logP))
    rec, bal = slope_residuals(th, phi)
    if rec > RESIDUAL_TOL or bal > RESIDUAL_TOL:
        raise PreconditionError(f"slope residuals too large: recurrence {rec:.2e}, balance {bal:.2e}")
    return phi


@dataclass(frozen=True)
class Embedding:
    """Column coordinates of a periodic s-embedding.

    Attributes
    ----------
    block : ndarray
        theta_1..theta_{2n}.
    phi : ndarray
        Slopes phi_0..phi_{K-1} (periodic continuation).
    t_bullet, t_circ : ndarray
        t•_k and t°_k for k = 0..K-1.
    """

    block: np.ndarray
    phi: np.ndarray
    t_bullet: np.ndarray
    t_circ: np.ndarray

    @property
    def n(self) -> int:
        return self.block.size // 2

    @property
    def K(self) -> int:
        return self.phi.size

    def shifted(self, c: float) -> "Embedding":
        return Embedding(self.block, self.phi, self.t_bullet + c, self.t_circ + c)

    def quad_residuals(self) -> float:
        tp, cp = np.tan(self.phi), 1.0 / np.tan(self.phi)
        r1 = self.t_bullet[1:] - self.t_circ[:-1] - 0.5 * (tp[1:] + tp[:-1])
        r2 = self.t_circ[1:] - self.t_bullet[:-1] - 0.5 * (cp[1:] + cp[:-1])
        r3 = self.t_circ - self.t_bullet - 1.0 / np.tan(2.0 * self.phi)
        scale = max(1.0, float(np.max(np.abs(self.t_circ))))
        return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)), np.max(np.abs(r3)))) / scale

    def interleaved(self) -> bool:
        """t°_0 < t•_1 < t°_2 < ... and t•_0 < t°_1 < t•_2 < ..."""
        k = np.arange(self.K)
        a = np.where(k % 2 == 0, self.t_circ, self.t_bullet)
        b = np.where(k % 2 == 0, self.t_bullet, self.t_circ)
        return bool(np.all(np.diff(a) > 0) and np.all(np.diff(b) > 0))

    def points(self):
        """Rows (k, kind, x, phi) with x = -t (left half-plane orientation)."""
        rows = []
        for k in range(self.K):
            rows.append((k, "bullet", -float(self.t_bullet[k]), float(self.phi[k])))
            rows.append((k, "circ", -float(self.t_circ[k]), float(self.phi[k])))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "kind", "x", "phi"])
        for k, kind, x, p in self.points():
            w.writerow([k, kind, format(x, ".17g"), format(p, ".17g")])
        return buf.getvalue()

    def to_svg(self, rows: int = 4) -> str:
        """Vertices at (-t, s), s = 0..rows, and circles inscribed in the quads."""
        pts, circles = [], []
        for s in range(rows + 1):
            for k in range(self.K):
                t = self.t_circ[k] if (k + s) % 2 == 0 else self.t_bullet[k]
                pts.append((-float(t), float(s)))
        for s in range(rows):
            for k in range(self.K - 1):
                lo = self.t_circ[k] if (k + s) % 2 == 0 else self.t_bullet[k]
                hi = self.t_bullet[k + 1] if (k + s) % 2 == 0 else self.t_circ[k + 1]
                x = -0.5 * float(lo + hi)
                circles.append((x, s + 0.5, 0.5 * min(1.0, abs(float(hi - lo)))))
        xs = [p[0] for p in pts]
        pad = 0.5
        x0, x1 = min(xs) - pad, max(xs) + pad
        y0, y1 = -pad, rows + pad
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.6g} {y0:.6g} '
               f'{x1 - x0:.6g} {y1 - y0:.6g}">',
               '<g transform="scale(1,-1) translate(0,%.6g)">' % (-(y0 + y1))]
        for x, y, r in circles:
            out.append(f'<circle cx="{x:.9g}" cy="{y:.9g}" r="{r:.9g}" fill="none" '
                       'stroke="#888" stroke-width="0.01"/>')
        for x, y in pts:
            out.append(f'<circle cx="{x:.9g}" cy="{y:.9g}" r="0.03" fill="black"/>')
        out.append("</g></svg>")
        return "\n".join(out) + "\n"


def embed(block, K: int | None = None, anchor: float = 0.0) -> Embedding:
    """Coordinates for K columns from t°_0 = anchor and t•_0 = anchor - cot(2 phi_0)."""
    th = _critical_block(block)
    per = solve_slopes(th)
    if K is None:
        K = 2 * per.size
    if K < per.size:
        raise DomainError(f"K must be at least the period {per.size}")
    phi = np.resize(per, K)
    tp, cp = np.tan(phi), 1.0 / np.tan(phi)
    tb = np.empty(K)
    tc = np.empty(K)
    tc[0] = anchor
    tb[0] = anchor - 1.0 / math.tan(2.0 * phi[0])
    for k in range(K - 1):
        tb[k + 1] = tc[k] + 0.5 * (tp[k + 1] + tp[k])
        tc[k + 1] = tb[k] + 0.5 * (cp[k + 1] + cp[k])
    return Embedding(th, phi, tb, tc)


@dataclass(frozen=True)
class PeriodWidth:
    coordinate: float
    half_sum: float
    geometric: float

    @property
    def spread(self) -> float:
        v = (self.coordinate, self.half_sum, self.geometric)
        return max(v) - min(v)


def period_width_forms(block) -> PeriodWidth:
    """B_S as t•_{2n} - t•_0, (sum tan + sum cot)/2 and (sum tan * sum cot)^{1/2}."""
    th = _critical_block(block)
    phi = solve_slopes(th)
    e = embed(th, 2 * phi.size + 1)
    st, sc = float(np.sum(np.tan(phi))), float(np.sum(1.0 / np.tan(phi)))
    return PeriodWidth(float(e.t_bullet[phi.size] - e.t_bullet[0]), 0.5 * (st + sc), math.sqrt(st * sc))


def period_width(block) -> float:
    return period_width_forms(block).half_sum


def width_vs_cj(block) -> tuple[float, float]:
    """(B_S, n * C_J)."""
    th = _critical_block(block)
    return period_width(th), (th.size // 2) * cj_constant(th)
