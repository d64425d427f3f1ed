"""Batched Gauss-Jordan elimination with scaled partial pivoting.

The GRP systems are tiny (at most 8x8) but there is one per cell interface,
so elimination runs over a whole stack of systems at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem

PIVOT_TOL = 1e-14


@dataclass(frozen=True)
class DenseSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    def solve(self) -> np.ndarray:
        return solve(self.matrix, self.rhs)


def solve(A, b, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Solve ``A x = b`` for one system or a stack of systems.

    Parameters
    ----------
    A : array_like, shape (..., n, n)
    b : array_like, shape (..., n) or (..., n, k)
    pivot_tol : float
        A pivot whose magnitude falls below ``pivot_tol`` times the largest
        entry of its (original) row is treated as zero.

    Returns
    -------
    x : ndarray with the shape of ``b``

    Raises
    ------
    SingularSystem
        If any system in the stack is numerically singular.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    vec = b.ndim == A.ndim - 1
    if vec:
        b = b[..., None]
    n = A.shape[-1]
    if A.shape[-2] != n:
        raise ValueError("matrix must be square")
    batch = A.shape[:-2]
    A = A.reshape((-1, n, n))
    b = b.reshape((-1, n, b.shape[-1]))
    m = A.shape[0]

    scale = np.max(np.abs(A), axis=2)
    if np.any(scale == 0.0):
        raise SingularSystem("zero row in linear system")
    A /= scale[:, :, None]
    b /= scale[:, :, None]

    rows = np.arange(m)
    for k in range(n):
        piv = k + np.argmax(np.abs(A[:, k:, k]), axis=1)
        swap = piv != k
        if np.any(swap):
            r = rows[swap]
            pk = piv[swap]
            A[r, k], A[r, pk] = A[r, pk].copy(), A[r, k].copy()
            b[r, k], b[r, pk] = b[r, pk].copy(), b[r, k].copy()
        pivot = A[:, k, k].copy()
        if np.any(np.abs(pivot) < pivot_tol):
            bad = int(np.argmax(np.abs(pivot) < pivot_tol))
            raise SingularSystem(f"pivot {pivot[bad]:.3e} in column {k} (system {bad})")
        A[:, k, :] /= pivot[:, None]
        b[:, k, :] /= pivot[:, None]
        f = A[:, :, k].copy()
        f[:, k] = 0.0
        A -= f[:, :, None] * A[:, k, None, :]
        b -= f[:, :, None] * b[:, k, None, :]

    x = b.reshape(batch + (n, b.shape[-1]))
    return x[..., 0] if vec else x
