"""Gamma-law gas dynamics for the quasi one-dimensional duct system.

Every function works on a single state or on a whole batch.  Batches are
numpy arrays whose last axis holds the three components, so ``q[..., 0]``
is density, ``q[..., 1]`` velocity and ``q[..., 2]`` pressure for primitive
data, and ``(rho, rho*u, E)`` for conserved data.  The dataclass wrappers
:class:`PrimitiveState` and :class:`ConservedState` are accepted anywhere an
array is.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DegenerateState, NonPhysicalState

#: Density or pressure below this value is treated as vacuum.
VACUUM_THRESHOLD = 1e-13
_BRANCH_TOL = 1e-14

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class GasModel:
    """Ideal gas with constant ratio of specific heats ``gamma``."""

    gamma: float = 1.4

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma!r}")

    @property
    def is_gamma3(self) -> bool:
        return abs(self.gamma - 3.0) <= _BRANCH_TOL

    @property
    def is_gamma53(self) -> bool:
        return abs(self.gamma - 5.0 / 3.0) <= _BRANCH_TOL


@dataclass(frozen=True)
class PrimitiveState:
    """Density, velocity and pressure (scalars or equally shaped arrays)."""

    rho: ArrayLike
    u: ArrayLike
    p: ArrayLike

    def array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                              for v in (self.rho, self.u, self.p))), axis=-1)

    @classmethod
    def from_array(cls, q) -> "PrimitiveState":
        q = np.asarray(q, dtype=float)
        if q.ndim == 1:
            return cls(float(q[0]), float(q[1]), float(q[2]))
        return cls(q[..., 0], q[..., 1], q[..., 2])

    def __array__(self, dtype=None, copy=None):
        a = self.array()
        return a if dtype is None else a.astype(dtype)


@dataclass(frozen=True)
class ConservedState:
    """Density, momentum density and total energy density."""

    rho: ArrayLike
    mom: ArrayLike
    E: ArrayLike

    def array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                              for v in (self.rho, self.mom, self.E))), axis=-1)

    @classmethod
    def from_array(cls, U) -> "ConservedState":
        U = np.asarray(U, dtype=float)
        if U.ndim == 1:
            return cls(float(U[0]), float(U[1]), float(U[2]))
        return cls(U[..., 0], U[..., 1], U[..., 2])

    def __array__(self, dtype=None, copy=None):
        a = self.array()
        return a if dtype is None else a.astype(dtype)


def _arr(x) -> np.ndarray:
    if isinstance(x, (PrimitiveState, ConservedState)):
        return x.array()
    return np.asarray(x, dtype=float)


def _gamma(g) -> float:
    return g.gamma if isinstance(g, GasModel) else float(g)


def check_physical(q, what: str = "state") -> None:
    """Raise :class:`NonPhysicalState` if any density or pressure is not positive."""
    q = _arr(q)
    bad = ~((q[..., 0] >= VACUUM_THRESHOLD) & (q[..., 2] >= VACUUM_THRESHOLD)
            & np.all(np.isfinite(q), axis=-1))
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad))[0]
        raise NonPhysicalState(f"non-physical {what} at index {tuple(idx)}: "
                               f"{np.atleast_2d(q)[idx[0]] if q.ndim > 1 else q}")


def prim_to_cons(q, g: GasModel):
    """Conserved variables ``(rho, rho*u, E)`` of a primitive state.

    Returns a :class:`ConservedState` for dataclass input and an array otherwise.
    """
    gam = _gamma(g)
    a = _arr(q)
    rho, u, p = a[..., 0], a[..., 1], a[..., 2]
    U = np.stack([rho, rho * u, p / (gam - 1.0) + 0.5 * rho * u * u], axis=-1)
    return ConservedState.from_array(U) if isinstance(q, PrimitiveState) else U


def cons_to_prim(U, g: GasModel):
    """Inverse of :func:`prim_to_cons`.

    Raises
    ------
    NonPhysicalState
        If density or internal energy is not positive.
    """
    gam = _gamma(g)
    a = _arr(U)
    rho, m, E = a[..., 0], a[..., 1], a[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = m / rho
        p = (gam - 1.0) * (E - 0.5 * m * u)
    q = np.stack([rho, u, p], axis=-1)
    check_physical(q, "conserved state")
    return PrimitiveState.from_array(q) if isinstance(U, ConservedState) else q


def sound_speed(q, g: GasModel):
    gam = _gamma(g)
    a = _arr(q)
    return np.sqrt(gam * a[..., 2] / a[..., 0])


def riemann_invariants(q, g: GasModel):
    """Entropy ``S = p rho**-gamma`` and the two acoustic invariants.

    Returns
    -------
    S, psi, phi : array_like
        ``psi = u + 2c/(gamma-1)`` is carried by the left-going fan and
        ``phi = u - 2c/(gamma-1)`` by the right-going one.
    """
    gam = _gamma(g)
    a = _arr(q)
    rho, u, p = a[..., 0], a[..., 1], a[..., 2]
    c = np.sqrt(gam * p / rho)
    k = 2.0 / (gam - 1.0)
    return p * rho ** (-gam), u + k * c, u - k * c


def invariants_to_prim(S, psi, phi, g: GasModel):
    """Primitive state from ``(S, psi, phi)``; raises DegenerateState if psi <= phi."""
    gam = _gamma(g)
    S, psi, phi = (np.asarray(v, dtype=float) for v in (S, psi, phi))
    if np.any(psi <= phi):
        raise DegenerateState("psi <= phi describes a vacuum")
    c = 0.25 * (gam - 1.0) * (psi - phi)
    u = 0.5 * (psi + phi)
    rho = (c * c / (gam * S)) ** (1.0 / (gam - 1.0))
    p = S * rho ** gam
    q = np.stack(np.broadcast_arrays(rho, u, p), axis=-1)
    return q


def source_term(x, q, geom: "DuctGeometry", g: GasModel):
    """Area source of the primitive system, ``-(A'/A) (rho u, 0, rho c^2 u)``."""
    gam = _gamma(g)
    a = _arr(q)
    gl = np.asarray(geom.dlogA(x), dtype=float)
    return source_from_dlogA(a, gl, gam)


def source_from_dlogA(q: np.ndarray, gl, gamma: float) -> np.ndarray:
    """Primitive source for a given value of ``A'/A`` (broadcast over the batch)."""
    rho, u, p = q[..., 0], q[..., 1], q[..., 2]
    gl = np.asarray(gl, dtype=float)
    z = np.zeros_like(rho * gl)
    return np.stack([-gl * rho * u, z, -gl * gamma * p * u], axis=-1)


def primitive_jacobian(q, g: GasModel) -> np.ndarray:
    """Coefficient matrix ``J`` of ``Q_t + J Q_x = H``; shape ``(..., 3, 3)``."""
    gam = _gamma(g)
    a = _arr(q)
    rho, u, p = a[..., 0], a[..., 1], a[..., 2]
    J = np.zeros(a.shape + (3,))
    J[..., 0, 0] = u
    J[..., 0, 1] = rho
    J[..., 1, 1] = u
    J[..., 1, 2] = 1.0 / rho
    J[..., 2, 1] = gam * p
    J[..., 2, 2] = u
    return J


def conserved_jacobians(q, g: GasModel):
    """Return ``(dU/dQ, dF/dQ)`` where ``F = (rho u, rho u^2 + p, (E + p) u)``."""
    gam = _gamma(g)
    a = _arr(q)
    rho, u, p = a[..., 0], a[..., 1], a[..., 2]
    dU = np.zeros(a.shape + (3,))
    dU[..., 0, 0] = 1.0
    dU[..., 1, 0] = u
    dU[..., 1, 1] = rho
    dU[..., 2, 0] = 0.5 * u * u
    dU[..., 2, 1] = rho * u
    dU[..., 2, 2] = 1.0 / (gam - 1.0)
    dF = np.zeros_like(dU)
    dF[..., 0, 0] = u
    dF[..., 0, 1] = rho
    dF[..., 1, 0] = u * u
    dF[..., 1, 1] = 2.0 * rho * u
    dF[..., 1, 2] = 1.0
    dF[..., 2, 0] = 0.5 * u ** 3
    dF[..., 2, 1] = gam * p / (gam - 1.0) + 1.5 * rho * u * u
    dF[..., 2, 2] = gam * u / (gam - 1.0)
    return dU, dF


def conserved_second_variations(q, d, g: GasModel):
    """Quadratic forms ``d^T (d^2 U/dQ^2) d`` and ``d^T (d^2 F/dQ^2) d``.

    ``d`` is a primitive increment with the same batch shape as ``q``.
    """
    gam = _gamma(g)
    a, d = _arr(q), np.asarray(d, dtype=float)
    rho, u = a[..., 0], a[..., 1]
    dr, du, dp = d[..., 0], d[..., 1], d[..., 2]
    z = np.zeros_like(rho * dr)
    d2U = np.stack([z, 2 * dr * du, 2 * u * dr * du + rho * du * du], axis=-1)
    d2F = np.stack([2 * dr * du,
                    4 * u * dr * du + 2 * rho * du * du,
                    3 * u * u * dr * du + 3 * rho * u * du * du
                    + 2 * gam / (gam - 1.0) * du * dp], axis=-1)
    return d2U, d2F


def planar_flux(U, g: GasModel) -> np.ndarray:
    """Euler flux ``(rho u, rho u^2 + p, (E + p) u)`` of conserved data."""
    gam = _gamma(g)
    U = _arr(U)
    rho, m, E = U[..., 0], U[..., 1], U[..., 2]
    u = m / rho
    p = (gam - 1.0) * (E - 0.5 * m * u)
    return np.stack([m, m * u + p, (E + p) * u], axis=-1)


def invariant_gradients(q, g: GasModel) -> np.ndarray:
    """Gradients of ``(S, psi, phi)`` with respect to ``(rho, u, p)``; shape ``(..., 3, 3)``."""
    gam = _gamma(g)
    a = _arr(q)
    rho, p = a[..., 0], a[..., 2]
    c = np.sqrt(gam * p / rho)
    S = p * rho ** (-gam)
    G = np.zeros(a.shape + (3,))
    G[..., 0, 0] = -gam * S / rho
    G[..., 0, 2] = S / p
    k = c / (gam - 1.0)
    G[..., 1, 0] = -k / rho
    G[..., 1, 1] = 1.0
    G[..., 1, 2] = k / p
    G[..., 2, 0] = k / rho
    G[..., 2, 1] = 1.0
    G[..., 2, 2] = -k / p
    return G


def invariant_second_variations(q, d, g: GasModel) -> np.ndarray:
    """``d^T (d^2 w) d`` for ``w = (S, psi, phi)``; shape ``(..., 3)``."""
    gam = _gamma(g)
    a, d = _arr(q), np.asarray(d, dtype=float)
    rho, p = a[..., 0], a[..., 2]
    dr, dp = d[..., 0], d[..., 2]
    c = np.sqrt(gam * p / rho)
    S = p * rho ** (-gam)
    hS = gam * (gam + 1.0) * S / rho ** 2 * dr * dr - 2.0 * gam * S / (rho * p) * dr * dp
    # second variation of c
    hc = c * (0.75 * dr * dr / rho ** 2 - 0.5 * dr * dp / (rho * p) - 0.25 * dp * dp / p ** 2)
    k = 2.0 / (gam - 1.0)
    return np.stack([hS, k * hc, -k * hc], axis=-1)


def eigenvalues(q, g: GasModel) -> np.ndarray:
    """``(u - c, u, u + c)`` stacked on the last axis."""
    a = _arr(q)
    c = sound_speed(a, g)
    u = a[..., 1]
    return np.stack([u - c, u, u + c], axis=-1)


# --------------------------------------------------------------------------
# geometry

def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class DuctGeometry:
    """Cross-section ``A(x)`` together with ``A'/A`` and ``(A'/A)'``.

    Use the factory methods; :meth:`from_area` falls back to centred
    differences when derivatives are not given.
    """

    area: Callable
    dlogA: Callable
    d_dlogA: Callable
    is_planar: bool = False
    name: str = "custom"

    @classmethod
    def planar(cls) -> "DuctGeometry":
        return cls(_one, _zero, _zero, True, "planar")

    @classmethod
    def from_area(cls, area: Callable, darea: Callable | None = None,
                  name: str = "custom") -> "DuctGeometry":
        def step(x):
            return 1e-6 * np.maximum(1.0, np.abs(x))

        if darea is None:
            def dlogA(x):
                x = np.asarray(x, dtype=float)
                h = step(x)
                return (np.log(area(x + h)) - np.log(area(x - h))) / (2 * h)
        else:
            def dlogA(x):
                return np.asarray(darea(x), dtype=float) / area(x)

        def d_dlogA(x):
            x = np.asarray(x, dtype=float)
            h = step(x)
            return (dlogA(x + h) - dlogA(x - h)) / (2 * h)

        return cls(area, dlogA, d_dlogA, False, name)

    @classmethod
    def laval_nozzle(cls, A_in: float = 4.8643, A_ex: float = 4.2346) -> "DuctGeometry":
        """Smooth converging-diverging nozzle on ``[0, 1]`` with unit throat at 0.25."""
        la, le = np.log(A_in), np.log(A_ex)
        tp = 2 * np.pi

        def area(x):
            x = np.asarray(x, dtype=float)
            th = tp * (1.0 - x) / 3.0
            return np.where(x < 0.25, np.exp(la * np.cos(tp * x) ** 2),
                            np.exp(le * np.cos(th) ** 2))

        def dlogA(x):
            x = np.asarray(x, dtype=float)
            th = tp * (1.0 - x) / 3.0
            return np.where(x < 0.25, -np.pi * 2 * la * np.sin(2 * tp * x),
                            (tp / 3.0) * le * np.sin(2 * th))

        def d_dlogA(x):
            x = np.asarray(x, dtype=float)
            th = tp * (1.0 - x) / 3.0
            return np.where(x < 0.25, -2 * tp * tp * la * np.cos(2 * tp * x),
                            -(2.0 / 9.0) * tp * tp * le * np.cos(2 * th))

        return cls(area, dlogA, d_dlogA, False, "laval")

    def cell_volumes(self, edges: np.ndarray) -> np.ndarray:
        """Integrals of ``A`` over consecutive intervals (5-point Gauss)."""
        edges = np.asarray(edges, dtype=float)
        if self.is_planar:
            return np.diff(edges)
        xg, wg = np.polynomial.legendre.leggauss(5)
        a, b = edges[:-1], edges[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        pts = mid[:, None] + half[:, None] * xg[None, :]
        return half * (self.area(pts) @ wg)
