"""Sub-cell reconstruction of conserved cell averages.

Both reconstructions return a :class:`CellPoly` whose coefficients describe,
per cell and per conserved component,

    U(x) = a0 + a1 xi + a2 (xi^2 - 1/12),    xi = (x - x_j) / dx,

so the cell average is ``a0`` by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gas import _gamma, cons_to_prim, conserved_jacobians, conserved_second_variations

WENO_EPS = 1e-6


@dataclass
class CellPoly:
    """Per-cell quadratics in the scaled coordinate ``xi``.

    ``coef`` has shape ``(N, 3, 3)``: cell, component, power (0, 1, 2).
    """

    coef: np.ndarray
    dx: float

    @property
    def degree(self) -> int:
        return 2 if np.any(self.coef[..., 2]) else 1

    def mean(self) -> np.ndarray:
        return self.coef[..., 0]

    def value(self, xi) -> np.ndarray:
        """Values at scaled position ``xi`` (scalar or per-cell array)."""
        xi = np.asarray(xi, dtype=float)
        xi = xi[..., None] if xi.ndim else xi
        c = self.coef
        return c[..., 0] + c[..., 1] * xi + c[..., 2] * (xi * xi - 1.0 / 12.0)

    def dx1(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        xi = xi[..., None] if xi.ndim else xi
        return (self.coef[..., 1] + 2.0 * self.coef[..., 2] * xi) / self.dx

    def dx2(self) -> np.ndarray:
        return 2.0 * self.coef[..., 2] / self.dx ** 2

    def face_jets(self, side: str):
        """``(U, U_x, U_xx)`` at the right (``"R"``) or left (``"L"``) face of every cell."""
        xi = 0.5 if side == "R" else -0.5
        return self.value(xi), self.dx1(xi), self.dx2()


def van_leer(a, b):
    """Van Leer limited slope of one-sided differences ``a`` and ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = a * b
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(ab > 0.0, 2.0 * ab / (a + b), 0.0)
    return s


LIMITERS = {"vanleer": van_leer, "vanLeer": van_leer}


def reconstruct_muscl(averages, limiter: str = "vanleer", ghosts: int = 1) -> CellPoly:
    """Limited linear reconstruction.

    ``averages`` has shape ``(N + 2 g, 3)`` including ``g = ghosts`` ghost
    cells per side; slopes are returned for every cell but the outermost.
    The ``dx`` of the returned poly is 1 (scaled slopes); callers rescale.
    """
    U = np.asarray(averages, dtype=float)
    lim = LIMITERS[limiter]
    coef = np.zeros(U.shape + (3,))
    coef[..., 0] = U
    coef[1:-1, :, 1] = lim(U[1:-1] - U[:-2], U[2:] - U[1:-1])
    return CellPoly(coef, 1.0)


# -- WENO5 ---------------------------------------------------------------

def _weno5_left(v):
    """Fifth-order WENO value at the right face of the centre cell of ``v[0..4]``."""
    v0, v1, v2, v3, v4 = v
    b0 = 13.0 / 12.0 * (v0 - 2 * v1 + v2) ** 2 + 0.25 * (v0 - 4 * v1 + 3 * v2) ** 2
    b1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
    b2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (3 * v2 - 4 * v3 + v4) ** 2
    p0 = (2 * v0 - 7 * v1 + 11 * v2) / 6.0
    p1 = (-v1 + 5 * v2 + 2 * v3) / 6.0
    p2 = (2 * v2 + 5 * v3 - v4) / 6.0
    a0 = 0.1 / (WENO_EPS + b0) ** 2
    a1 = 0.6 / (WENO_EPS + b1) ** 2
    a2 = 0.3 / (WENO_EPS + b2) ** 2
    return (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2)


def _char_basis(q, gam):
    """Right eigenvectors of the conserved Jacobian and their inverse, ``(M, 3, 3)``."""
    rho, u, p = q[:, 0], q[:, 1], q[:, 2]
    c = np.sqrt(gam * p / rho)
    H = (gam / (gam - 1.0)) * p / rho + 0.5 * u * u
    one = np.ones_like(u)
    R = np.stack([np.stack([one, one, one], -1),
                  np.stack([u - c, u, u + c], -1),
                  np.stack([H - u * c, 0.5 * u * u, H + u * c], -1)], axis=1)
    return R, np.linalg.inv(R)


def weno5_faces(averages, gamma, ghosts: int = 3):
    """Characteristic-wise WENO5 values on both sides of every interior face.

    Returns ``(minus, plus)``, each ``(N + 1, 3)``: the limit from the left
    and from the right at faces ``0 .. N`` of the ``N`` non-ghost cells.
    The projection uses the arithmetic mean of the two adjacent cells.
    """
    gam = _gamma(gamma)
    U = np.asarray(averages, dtype=float)
    g = ghosts
    if g < 3:
        raise ValueError("WENO5 needs three ghost cells")
    n = U.shape[0] - 2 * g
    # face f sits between cells g-1+f and g+f of the padded array
    left = np.arange(n + 1) + g - 1
    qbar = cons_to_prim(0.5 * (U[left] + U[left + 1]), gam)
    R, L = _char_basis(qbar, gam)
    st = np.stack([U[left + k] for k in range(-2, 4)], axis=1)  # (F, 6, 3)
    W = np.einsum("fij,fkj->fki", L, st)
    wm = _weno5_left([W[:, k] for k in range(5)])
    wp = _weno5_left([W[:, 5 - k] for k in range(5)])
    minus = np.einsum("fij,fj->fi", R, wm)
    plus = np.einsum("fij,fj->fi", R, wp)
    return minus, plus


def reconstruct_weno3(averages, gamma, ghosts: int = 3):
    """Quadratic per cell matching both WENO5 face values and the cell average.

    Returns the :class:`CellPoly` for the ``N`` interior cells (``dx = 1``)
    together with the face values ``(minus, plus)``.
    """
    U = np.asarray(averages, dtype=float)
    g = ghosts
    minus, plus = weno5_faces(U, gamma, g)
    a = U[g:-g]
    uL = plus[:-1]   # left face of each cell, seen from inside
    uR = minus[1:]   # right face of each cell
    coef = np.zeros(a.shape + (3,))
    coef[..., 0] = a
    coef[..., 1] = uR - uL
    coef[..., 2] = 3.0 * (uR + uL - 2.0 * a)
    return CellPoly(coef, 1.0), (minus, plus)


def primitive_jets(U, Ux, Uxx, gamma):
    """Convert conserved point data and derivatives to primitive ones."""
    gam = _gamma(gamma)
    q = cons_to_prim(U, gam)
    dU, _ = conserved_jacobians(q, gam)
    qx = np.linalg.solve(dU, Ux[..., None])[..., 0]
    if Uxx is None:
        return q, qx, None
    d2U, _ = conserved_second_variations(q, qx, gam)
    qxx = np.linalg.solve(dU, (Uxx - d2U)[..., None])[..., 0]
    return q, qx, qxx

