"""Benchmark catalog: interface-accuracy problems and finite-volume test cases.

Two kinds of cases live here.  *Solver* cases carry polynomial initial data
on either side of ``x = 0`` and are used to measure how well the GRP
solutions reproduce ``U(0, t)`` for small ``t``.  *Scheme* cases are the
usual shock-tube and nozzle benchmarks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from . import riemann
from .errors import NoRoot
from .gas import DuctGeometry, GasModel, PrimitiveState
from .grp import GRPInput

GAMMA = 1.4

# acoustic-case polynomials, coefficients in increasing powers of x
_ACOUSTIC_LEFT = ((1.0, 0.56431, 2.62896), (0.03125, -1.024, 1.92), (10.0, -0.216, 1.08))
_ACOUSTIC_RIGHT = ((1.0, 2.04204), (0.03125, -0.25, 0.75), (10.0,))

# pressure jump -> t0 for the nonlinear solver tables
DELTA_P_T0 = {0.01: 0.1, 0.1: 0.1, 1.0: 0.1, 10.0: 0.05, 100.0: 0.01, 1000.0: 0.005}
HALVINGS = (1.0, 0.5, 0.25, 0.125)
SONIC_FACTORS = (1.0, 2.0 / 3.0, 0.5, 1.0 / 3.0)
SONIC_T0 = 0.002
SONIC_DELTA_U = 28.0

NOZZLE_RHO0 = 1.0
NOZZLE_P0 = 1.0
NOZZLE_PB_A = 0.0272237
NOZZLE_PB_B = 0.4
NOZZLE_THROAT = 0.25


@dataclass(frozen=True)
class CaseSpec:
    """One benchmark problem.

    ``initial`` maps an array of positions to primitive states ``(N, 3)``.
    Solver cases also carry ``left``/``right`` polynomial triples for
    ``(rho, u, p)`` and the sample times in ``times``.
    """

    name: str
    domain: tuple
    t_end: float
    gamma: float
    geometry: DuctGeometry
    initial: Callable
    bc_left: str = "transmissive"
    bc_right: str = "transmissive"
    reference: str = "exact"
    n_cells: int = 100
    left: tuple | None = None
    right: tuple | None = None
    times: tuple = ()
    norm: str = "U"
    params: dict = field(default_factory=dict)

    @property
    def gas(self) -> GasModel:
        return GasModel(self.gamma)

    @property
    def is_solver_case(self) -> bool:
        return self.left is not None

    def grp_input(self) -> GRPInput:
        """Interface data at ``x = 0`` with exact first and second derivatives."""
        if not self.is_solver_case:
            raise ValueError(f"{self.name} has no polynomial interface data")

        def jets(polys):
            return [np.array([P.deriv(k)(0.0) if k else P(0.0) for P in polys])
                    for k in range(3)]

        l0, l1, l2 = jets(self.left)
        r0, r1, r2 = jets(self.right)
        return GRPInput.create(l0, r0, l1, r1, l2, r2, gas=self.gas)

    def max_speed(self, half_width: float) -> float:
        """Largest ``|u| + c`` of the initial data on ``[-half_width, half_width]``."""
        x = np.linspace(-half_width, half_width, 2001)
        q = self.initial(x)
        return float(np.max(np.abs(q[:, 1]) + np.sqrt(self.gamma * q[:, 2] / q[:, 0])))


def _polys(coeffs) -> tuple:
    return tuple(Polynomial(c) for c in coeffs)


def _piecewise_poly(left, right) -> Callable:
    def init(x):
        x = np.asarray(x, dtype=float)
        L = np.stack([P(x) for P in left], axis=-1)
        R = np.stack([P(x) for P in right], axis=-1)
        return np.where((x < 0.0)[..., None], L, R)
    return init


def _solver_case(name, left, right, t0, factors, norm="U", **params) -> CaseSpec:
    return CaseSpec(name=name, domain=(-1.0, 1.0), t_end=t0, gamma=GAMMA,
                    geometry=DuctGeometry.planar(), initial=_piecewise_poly(left, right),
                    reference="fine_mesh", n_cells=20000, left=left, right=right,
                    times=tuple(t0 * f for f in factors), norm=norm, params=dict(t0=t0, **params))


def acoustic_case() -> CaseSpec:
    return _solver_case("acoustic", _polys(_ACOUSTIC_LEFT), _polys(_ACOUSTIC_RIGHT), 0.1,
                        HALVINGS, delta_p=0.0)


def pressure_jump_case(delta_p: float, delta_u: float = 0.0) -> CaseSpec:
    """Acoustic data with the left pressure raised so that ``(pL - pR)/pR = delta_p``."""
    left = [list(c) for c in _ACOUSTIC_LEFT]
    right = [list(c) for c in _ACOUSTIC_RIGHT]
    left[2][0] += delta_p * right[2][0]
    left[1][0] += delta_u
    right[1][0] += delta_u
    if delta_u:
        return _solver_case("sonic", _polys(left), _polys(right), SONIC_T0, SONIC_FACTORS,
                            norm="Phi", delta_p=delta_p, delta_u=delta_u)
    return _solver_case(f"dp{delta_p:g}", _polys(left), _polys(right), DELTA_P_T0[delta_p],
                        HALVINGS, delta_p=delta_p)


def sonic_case() -> CaseSpec:
    return pressure_jump_case(100.0, SONIC_DELTA_U)


def _riemann_init(qL, qR, x0=0.0) -> Callable:
    qL = np.asarray(qL, dtype=float)
    qR = np.asarray(qR, dtype=float)

    def init(x):
        x = np.asarray(x, dtype=float)
        return np.where((x < x0)[..., None], qL, qR)
    return init


def _blast_init(x):
    x = np.asarray(x, dtype=float)
    p = np.where(x < 10.0, 1000.0, np.where(x < 90.0, 0.01, 100.0))
    return np.stack([np.ones_like(x), np.zeros_like(x), p], axis=-1)


def _shock_density_init(x):
    x = np.asarray(x, dtype=float)
    post = np.array([3.57134, 2.629369, 10.33333])
    ahead = np.stack([1.0 + 0.2 * np.sin(5.0 * x), np.zeros_like(x), np.ones_like(x)], axis=-1)
    return np.where((x < 1.0)[..., None], post, ahead)


def _nozzle_init(p_b):
    rhoR = NOZZLE_RHO0 * (p_b / NOZZLE_P0) ** (1.0 / GAMMA)
    return _riemann_init((NOZZLE_RHO0, 0.0, p_b), (rhoR, 0.0, p_b), NOZZLE_THROAT)


def _smooth_wave_init(x):
    x = np.asarray(x, dtype=float)
    return np.stack([1.0 + 0.2 * np.sin(2 * np.pi * x), np.ones_like(x), np.ones_like(x)],
                    axis=-1)


def scheme_cases() -> list:
    planar = DuctGeometry.planar()
    nozzle = DuctGeometry.laval_nozzle()
    return [
        CaseSpec("sod", (-5.0, 5.0), 2.0, GAMMA, planar,
                 _riemann_init((1.0, 0.0, 1.0), (0.125, 0.0, 0.1)), n_cells=100,
                 params=dict(qL=(1.0, 0.0, 1.0), qR=(0.125, 0.0, 0.1))),
        CaseSpec("123", (-5.0, 5.0), 1.2, GAMMA, planar,
                 _riemann_init((1.0, -2.0, 0.4), (1.0, 2.0, 0.4)), n_cells=100,
                 params=dict(qL=(1.0, -2.0, 0.4), qR=(1.0, 2.0, 0.4))),
        CaseSpec("blast", (0.0, 100.0), 3.8, GAMMA, planar, _blast_init, "reflective",
                 "reflective", reference="none", n_cells=400),
        CaseSpec("shock_density", (0.0, 10.0), 2.0, GAMMA, planar, _shock_density_init,
                 reference="none", n_cells=400),
        CaseSpec("nozzle_a", (0.0, 1.0), 15.5, GAMMA, nozzle, _nozzle_init(NOZZLE_PB_A),
                 "nozzle_inflow", "nozzle_outflow", reference="steady", n_cells=22,
                 params=dict(p_b=NOZZLE_PB_A, rho0=NOZZLE_RHO0, p0=NOZZLE_P0)),
        CaseSpec("nozzle_b", (0.0, 1.0), 2.5, GAMMA, nozzle, _nozzle_init(NOZZLE_PB_B),
                 "nozzle_inflow", "nozzle_outflow", reference="none", n_cells=22,
                 params=dict(p_b=NOZZLE_PB_B, rho0=NOZZLE_RHO0, p0=NOZZLE_P0)),
    ]


def solver_cases() -> list:
    out = [acoustic_case()]
    out += [pressure_jump_case(dp) for dp in DELTA_P_T0]
    out.append(sonic_case())
    return out


def smooth_wave_case(n_cells: int = 50) -> CaseSpec:
    """Periodic density wave advected at unit speed; one period by ``t = 1``."""
    return CaseSpec("smooth_wave", (0.0, 1.0), 1.0, GAMMA, DuctGeometry.planar(),
                    _smooth_wave_init, "periodic", "periodic", reference="exact",
                    n_cells=n_cells)


def catalog() -> list:
    return scheme_cases() + solver_cases()


def get_case(name: str) -> CaseSpec:
    for case in catalog() + [smooth_wave_case()]:
        if case.name == name:
            return case
    raise KeyError(f"unknown case {name!r}")


# -- analytic solutions ----------------------------------------------------

def riemann_exact(case: CaseSpec, x, t) -> np.ndarray:
    """Exact solution of a planar Riemann case at time ``t > 0``."""
    if t <= 0:
        raise ValueError("t must be positive")
    fan = riemann.solve(np.asarray(case.params["qL"]), np.asarray(case.params["qR"]),
                        case.gas)
    return riemann.sample(fan, np.asarray(x, dtype=float) / t)


def sod_exact(x, t) -> np.ndarray:
    return riemann_exact(get_case("sod"), x, t)


def smooth_wave_exact(x, t) -> np.ndarray:
    return _smooth_wave_init(np.asarray(x, dtype=float) - t)


def area_mach_ratio(M, gamma: float = GAMMA):
    """``A/A*`` of isentropic flow at Mach number ``M``."""
    M = np.asarray(M, dtype=float)
    e = (gamma + 1.0) / (2.0 * (gamma - 1.0))
    return (2.0 / (gamma + 1.0) * (1.0 + 0.5 * (gamma - 1.0) * M * M)) ** e / M


def mach_from_area(ratio: float, branch: str, gamma: float = GAMMA, tol: float = 1e-12) -> float:
    """Root of the area-Mach relation on the ``"subsonic"`` or ``"supersonic"`` branch."""
    if ratio < 1.0 - 1e-12:
        raise NoRoot(f"area ratio {ratio:.6g} is below the throat area")
    if ratio <= 1.0:
        return 1.0

    def f(M):
        return area_mach_ratio(M, gamma) - ratio

    if branch == "subsonic":
        lo, hi = 1e-12, 1.0
    elif branch == "supersonic":
        lo, hi = 1.0, 2.0
        while f(hi) < 0.0:
            hi *= 2.0
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


def nozzle_steady(x, branch: str = "transonic", geometry: DuctGeometry | None = None,
                  rho0: float = NOZZLE_RHO0, p0: float = NOZZLE_P0, gamma: float = GAMMA):
    """Isentropic steady nozzle flow with unit throat area.

    ``branch`` is ``"subsonic"``, ``"supersonic"`` or ``"transonic"`` (subsonic
    upstream of the throat, supersonic downstream).  Returns a
    :class:`PrimitiveState` for scalar ``x`` and an ``(N, 3)`` array otherwise.
    """
    geometry = DuctGeometry.laval_nozzle() if geometry is None else geometry
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    M = np.empty_like(xs)
    for i, xi in enumerate(xs):
        b = branch
        if branch == "transonic":
            b = "subsonic" if xi < NOZZLE_THROAT else "supersonic"
        M[i] = mach_from_area(float(geometry.area(xi)), b, gamma)
    k = 1.0 + 0.5 * (gamma - 1.0) * M * M
    p = p0 * k ** (-gamma / (gamma - 1.0))
    rho = rho0 * k ** (-1.0 / (gamma - 1.0))
    u = M * np.sqrt(gamma * p / rho)
    q = np.stack([rho, u, p], axis=-1)
    if np.ndim(x) == 0:
        return PrimitiveState.from_array(q[0])
    return q
