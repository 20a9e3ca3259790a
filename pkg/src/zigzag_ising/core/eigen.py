"""Implicit-shift QL eigensolver for real symmetric tridiagonal matrices.

Only the leading ``rows`` rows of the orthogonal eigenvector matrix are
accumulated.  Each plane rotation acts on columns of Z, so every row evolves
independently and truncating Z to its first rows is exact.  With
``rows = 1`` this is the Golub-Welsch route to Gauss quadrature: the
squared first components are the quadrature weights.

Cost is O(rows * N^2) rather than O(N^3).
"""

from __future__ import annotations

import numba
import numpy as np

from ..errors import NumericError

MAX_SWEEPS = 60


@numba.njit(cache=True)
def _tql(d, e, z, max_sweeps):
    # d: diagonal (overwritten with eigenvalues); e: off-diagonal padded to
    # length n, e[i] couples i and i+1; z: (rows, n), starts as identity rows.
    n = d.shape[0]
    rows = z.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_sweeps:
                return l, it
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(rows):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1, 0


def tridiagonal_eigh(diag, offdiag, rows: int = 1):
    """Eigenvalues and leading eigenvector rows of a symmetric tridiagonal matrix.

    Parameters
    ----------
    diag : array_like, shape (N,)
    offdiag : array_like, shape (N-1,)
        Entries coupling i and i+1.  Their signs do not affect eigenvalues or
        the squared components, only column signs of the eigenvectors.
    rows : int
        How many leading rows of the eigenvector matrix to return.

    Returns
    -------
    evals : ndarray, shape (N,)
        Ascending.
    z : ndarray, shape (rows, N)
        ``z[i, j]`` is component i of the unit eigenvector for ``evals[j]``.
    """
    d = np.array(diag, dtype=float)
    n = d.shape[0]
    off = np.asarray(offdiag, dtype=float)
    if off.shape[0] != max(n - 1, 0):
        raise ValueError("offdiag must have length len(diag) - 1")
    rows = int(min(max(rows, 0), n))
    e = np.zeros(n)
    e[: n - 1] = off
    z = np.zeros((rows, n))
    for k in range(rows):
        z[k, k] = 1.0
    if n > 1:
        failed, sweeps = _tql(d, e, z, MAX_SWEEPS)
        if failed >= 0:
            raise NumericError(
                f"QL iteration did not converge for eigenvalue {failed} "
                f"after {sweeps} sweeps (N={n})"
            )
    order = np.argsort(d, kind="stable")
    return d[order], z[:, order]


def tridiagonal_eigvalsh(diag, offdiag):
    return tridiagonal_eigh(diag, offdiag, rows=0)[0]
