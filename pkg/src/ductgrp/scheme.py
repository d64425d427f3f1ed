"""One-step GRP finite-volume schemes for planar and duct flow.

The unknowns are area-weighted cell averages of the conserved variables.
``order=2`` pairs a van Leer reconstruction with the linear GRP solver and a
mid-point flux; ``order=3`` pairs a WENO-based quadratic reconstruction with
the quadratic GRP solver and two-point Gauss quadrature in time.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import grp, riemann
from .cases import CaseSpec
from .errors import DuctGRPError, NonPhysicalState
from .gas import (DuctGeometry, GasModel, _gamma, cons_to_prim, planar_flux, prim_to_cons,
                  sound_speed)
from .grp import GRPInput
from .jets import ck_jets
from .reconstruct import CellPoly, primitive_jets, reconstruct_muscl, reconstruct_weno3

log = logging.getLogger(__name__)

GAUSS2 = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))
BC_KINDS = ("transmissive", "reflective", "periodic", "nozzle_inflow", "nozzle_outflow")
POSITIVITY_FLOOR = 1e-13
END_SLACK = 1e-4


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if self.n_cells <= 0 or self.x_max <= self.x_min:
            raise ValueError("grid needs x_max > x_min and at least one cell")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells + 1)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])


@dataclass
class SchemeConfig:
    order: int = 2
    cfl: float = 0.5
    limiter: str = "vanleer"
    grp_mode: str = "exact"
    bc_left: str = "transmissive"
    bc_right: str = "transmissive"
    t_end: float = 1.0
    gamma: float = 1.4
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order not in (2, 3):
            raise ValueError("order must be 2 or 3")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        for bc in (self.bc_left, self.bc_right):
            if bc not in BC_KINDS:
                raise ValueError(f"unknown boundary condition {bc!r}")
        if (self.bc_left == "periodic") != (self.bc_right == "periodic"):
            raise ValueError("periodic boundaries must be used on both sides")

    @classmethod
    def for_case(cls, case: CaseSpec, **overrides) -> "SchemeConfig":
        kw = dict(bc_left=case.bc_left, bc_right=case.bc_right, t_end=case.t_end,
                  gamma=case.gamma, params=dict(case.params))
        kw.update(overrides)
        return cls(**kw)


@dataclass
class FlowState:
    """Cell averages ``U`` (shape ``(N, 3)``) on ``grid`` at time ``t``."""

    U: np.ndarray
    grid: Grid
    geometry: DuctGeometry
    t: float = 0.0

    def primitive(self, gamma) -> np.ndarray:
        return cons_to_prim(self.U, gamma)


@dataclass
class StepInfo:
    dt: float
    residual: float
    fallbacks: int


# -- geometry helpers -------------------------------------------------------

class _DuctData:
    """Per-grid geometric factors, cached between steps."""

    def __init__(self, grid: Grid, geom: DuctGeometry):
        e = grid.edges
        self.planar = geom.is_planar
        self.A_face = np.asarray(geom.area(e), dtype=float) * np.ones(e.shape)
        self.vol = geom.cell_volumes(e)
        self.g_face = np.asarray(geom.dlogA(e), float) * np.ones(e.shape)
        self.gp_face = np.asarray(geom.d_dlogA(e), float) * np.ones(e.shape)
        xc = grid.centers
        self.x_c = xc
        self.geom = geom
        self.dA = np.diff(self.A_face)
        # int A'(x) p(x) dx with p interpolated at in-cell nodes: the centre for
        # order 2, the two Gauss points for order 3
        xg, wg = np.polynomial.legendre.leggauss(5)
        h = grid.dx
        pts = xc[:, None] + 0.5 * h * xg[None, :]
        dAx = geom.dlogA(pts) * geom.area(pts)
        xi = 0.5 * xg
        n1, n2 = -0.5 / np.sqrt(3.0), 0.5 / np.sqrt(3.0)
        w1 = 0.5 * h * (dAx * (xi - n2) / (n1 - n2)) @ wg
        # the last weight absorbs the quadrature error so constant p is exact
        self.source_nodes = {2: (0.0,), 3: (n1, n2)}
        self.source_weights = {2: (self.dA,), 3: (w1, self.dA - w1)}


# -- boundary conditions ------------------------------------------------

def _nozzle_inflow_state(q_in, rho0, p0, gam):
    """Subsonic inflow from a reservoir: stagnation data plus the outgoing invariant."""
    S0 = p0 / rho0 ** gam
    c0sq = gam * p0 / rho0
    c_in = np.sqrt(gam * q_in[2] / q_in[0])
    phi = q_in[1] - 2.0 * c_in / (gam - 1.0)
    a = 0.25 * (gam - 1.0) + 0.5
    b = -0.5 * (gam - 1.0) * phi
    cc = 0.25 * (gam - 1.0) * phi * phi - c0sq / (gam - 1.0)
    disc = b * b - 4 * a * cc
    if disc < 0:
        return np.array([rho0, 0.0, p0])
    u = (-b + np.sqrt(disc)) / (2 * a)
    u = max(u, 0.0)
    csq = c0sq - 0.5 * (gam - 1.0) * u * u
    rho = (csq / (gam * S0)) ** (1.0 / (gam - 1.0))
    return np.array([rho, u, S0 * rho ** gam])


def _nozzle_outflow_state(q_in, p_b, gam):
    c = np.sqrt(gam * q_in[2] / q_in[0])
    if q_in[1] >= c:
        return q_in.copy()
    S = q_in[2] / q_in[0] ** gam
    psi = q_in[1] + 2.0 * c / (gam - 1.0)
    rho = (p_b / S) ** (1.0 / gam)
    cb = np.sqrt(gam * p_b / rho)
    return np.array([rho, psi - 2.0 * cb / (gam - 1.0), p_b])


def apply_bc(U, n_ghost: int, kind_left: str, kind_right: str, gamma=1.4, aux=None):
    """Return ``U`` padded with ``n_ghost`` ghost cells on each side.

    ``aux`` supplies ``rho0``/``p0`` for nozzle inflow and ``p_b`` for
    nozzle outflow.
    """
    gam = _gamma(gamma)
    aux = {} if aux is None else aux
    U = np.asarray(U, dtype=float)
    g = n_ghost
    out = np.empty((U.shape[0] + 2 * g, 3))
    out[g:-g] = U
    for side, kind in (("L", kind_left), ("R", kind_right)):
        if side == "L":
            inner, ghost = U[:g], slice(0, g)
            edge = U[0]
        else:
            inner, ghost = U[-g:], slice(-g, None)
            edge = U[-1]
        if kind == "transmissive":
            out[ghost] = edge
        elif kind == "reflective":
            m = inner[::-1].copy()
            m[:, 1] *= -1.0
            out[ghost] = m
        elif kind == "periodic":
            out[ghost] = U[-g:] if side == "L" else U[:g]
        elif kind == "nozzle_inflow":
            q = _nozzle_inflow_state(cons_to_prim(edge, gam), aux.get("rho0", 1.0),
                                     aux.get("p0", 1.0), gam)
            out[ghost] = prim_to_cons(q, gam)
        elif kind == "nozzle_outflow":
            q = _nozzle_outflow_state(cons_to_prim(edge, gam), aux["p_b"], gam)
            out[ghost] = prim_to_cons(q, gam)
        else:
            raise ValueError(f"unknown boundary condition {kind!r}")
    return out


def compute_dt(states, grid: Grid, cfl: float, gamma=1.4) -> float:
    """``cfl * dx / max(|u| + c)`` for primitive ``states``."""
    q = np.asarray(states, dtype=float)
    smax = np.max(np.abs(q[..., 1]) + sound_speed(q, gamma))
    return cfl * grid.dx / smax


# -- interface solutions ------------------------------------------------------

def _physical(U):
    rho = U[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        e = U[..., 2] - 0.5 * U[..., 1] ** 2 / rho
    return (rho > POSITIVITY_FLOOR) & (e > POSITIVITY_FLOOR)


def _godunov_states(inp: GRPInput, n_tau):
    fan = riemann.solve(inp.qL, inp.qR, inp.gas)
    U0 = prim_to_cons(riemann.sample(fan, 0.0), inp.gas.gamma)
    return np.broadcast_to(U0, (n_tau,) + U0.shape).copy()


def interface_states(inp: GRPInput, solver_order: int, mode: str, taus):
    """Conserved states on the interfaces at the times ``taus``.

    Batches that make the GRP solver fail are split until the offending
    interfaces are isolated; those fall back to the Riemann value.  Taylor
    values that lose positivity are replaced by the Riemann value as well.
    Returns ``(U, n_fallback)`` with ``U`` of shape ``(len(taus), N, 3)``.
    """
    taus = list(taus)
    try:
        sol = grp.solve(inp, solver_order, mode)
    except (DuctGRPError, ValueError, ArithmeticError):
        if inp.size == 1:
            return _godunov_states(inp, len(taus)), 1
        h = inp.size // 2
        a, na = interface_states(inp.take(slice(0, h)), solver_order, mode, taus)
        b, nb = interface_states(inp.take(slice(h, None)), solver_order, mode, taus)
        return np.concatenate([a, b], axis=1), na + nb
    gam = inp.gas.gamma
    U0 = prim_to_cons(sol.q0, gam)
    out = np.empty((len(taus),) + U0.shape)
    bad_any = np.zeros(U0.shape[0], dtype=bool)
    for k, tau in enumerate(taus):
        with np.errstate(all="ignore"):
            try:
                U = sol.conserved_at(tau)
            except (DuctGRPError, ValueError, ArithmeticError):
                U = np.full_like(U0, np.nan)
        bad = ~_physical(U) | ~np.all(np.isfinite(U), axis=-1)
        U[bad] = U0[bad]
        bad_any |= bad
        out[k] = U
    return out, int(bad_any.sum())


# -- reconstruction -----------------------------------------------------------

def _face_jets(Ug, order, dx, gam, limiter):
    """Primitive jets on both sides of the ``N + 1`` faces from ghosted averages.

    ``Ug`` carries 2 ghost cells per side for order 2 and 4 for order 3.
    Cells whose reconstruction is not physical at a face drop to lower order.
    """
    if order == 2:
        poly = reconstruct_muscl(Ug, limiter)
        poly = CellPoly(poly.coef[1:-1], dx)  # cells -1 .. N
    else:
        poly, _ = reconstruct_weno3(Ug, gam, ghosts=3)
        poly = CellPoly(poly.coef, dx)        # cells -1 .. N
    n_lo = 0
    for _ in range(2):
        ok = _physical(poly.value(0.5)) & _physical(poly.value(-0.5))
        if order == 3 and ok.all():
            # the quadratic must also stay positive inside the cell
            ok &= _physical(poly.value(0.0))
        if ok.all():
            break
        bad = ~ok
        n_lo += int(bad.sum())
        if poly.coef[bad][..., 2].any():
            # quadratic -> limited linear
            off = (Ug.shape[0] - poly.coef.shape[0]) // 2
            lin = reconstruct_muscl(Ug, limiter).coef[off:off + poly.coef.shape[0]]
            poly.coef[bad] = lin[bad]
        else:
            poly.coef[bad, :, 1:] = 0.0
    second = order == 3
    UR, UxR, UxxR = poly.face_jets("R")
    UL, UxL, UxxL = poly.face_jets("L")
    qR_, qxR, qxxR = primitive_jets(UR, UxR, UxxR if second else None, gam)
    qL_, qxL, qxxL = primitive_jets(UL, UxL, UxxL if second else None, gam)
    # face f lies between cell f-1 (right face) and cell f (left face)
    jets = dict(qL=qR_[:-1], dqL=qxR[:-1], qR=qL_[1:], dqR=qxL[1:])
    if second:
        jets.update(d2qL=qxxR[:-1], d2qR=qxxL[1:])
    return jets, poly, n_lo


def _n_ghost(order):
    return 2 if order == 2 else 4


# -- time step ----------------------------------------------------------------

def _step(state: FlowState, config: SchemeConfig, dt: float | None = None,
          duct: _DuctData | None = None):
    gam = config.gamma
    grid = state.grid
    duct = _DuctData(grid, state.geometry) if duct is None else duct
    dx = grid.dx
    q = cons_to_prim(state.U, gam)
    if dt is None:
        dt = compute_dt(q, grid, config.cfl, gam)
    g = _n_ghost(config.order)
    Ug = apply_bc(state.U, g, config.bc_left, config.bc_right, gam, config.params)
    jets, poly, n_lo = _face_jets(Ug, config.order, dx, gam, config.limiter)
    inp = GRPInput.create(jets["qL"], jets["qR"], jets["dqL"], jets["dqR"], jets.get("d2qL"),
                          jets.get("d2qR"), duct.g_face, duct.gp_face, GasModel(gam))
    if config.order == 2:
        taus, weights = [0.5 * dt], [1.0]
    else:
        taus, weights = [a * dt for a in GAUSS2], [0.5, 0.5]
    Uf, n_fb = interface_states(inp, config.order - 1, config.grp_mode, taus)
    centre = None
    if not duct.planar:
        centre = _cell_pressures(poly.coef[1:-1], dx, duct, gam, taus, q[:, 2], config.order)
    Unew = state.U - dt / duct.vol[:, None] * _divergence(Uf, centre, weights, duct, config, gam)
    bad = ~_physical(Unew)
    if bad.any():
        # a posteriori fallback: first-order Godunov fluxes around the offending cells
        n = grid.n_cells
        god = _godunov_states(GRPInput.create(cons_to_prim(Ug[g - 1:g + n], gam),
                                              cons_to_prim(Ug[g:g + n + 1], gam),
                                              gas=GasModel(gam)), 1)[0]
        for _ in range(2):
            faces = np.zeros(n + 1, dtype=bool)
            faces[:-1] |= bad
            faces[1:] |= bad
            Uf[:, faces] = god[faces]
            if centre is not None:
                for per_tau in centre:
                    for c in per_tau:
                        c[bad] = q[bad, 2]
            n_fb += int(bad.sum())
            Unew = state.U - dt / duct.vol[:, None] * _divergence(Uf, centre, weights, duct,
                                                                  config, gam)
            bad_next = ~_physical(Unew)
            if not bad_next.any():
                break
            bad = bad_next | np.convolve(bad, [1, 1, 1], "same").astype(bool)
        else:
            raise NonPhysicalState(f"update lost positivity at t={state.t + dt:.6g}")
    residual = float(np.max(np.abs(Unew - state.U)) / dt)
    new = FlowState(Unew, grid, state.geometry, state.t + dt)
    return new, StepInfo(dt, residual, n_fb + n_lo)


def _divergence(Uf, centre, weights, duct, config, gam):
    """Time-averaged ``(A F)_{j+1/2} - (A F)_{j-1/2}`` minus the pressure source."""
    F = np.zeros(Uf.shape[1:])
    S = np.zeros((Uf.shape[1] - 1, 3))
    for k, w in enumerate(weights):
        F += w * planar_flux(Uf[k], gam)
        if centre is not None:
            for wn, pn in zip(duct.source_weights[config.order], centre[k]):
                S[:, 1] += w * wn * pn
    return np.diff(duct.A_face[:, None] * F, axis=0) - S


def _cell_pressures(coef, dx, duct, gam, taus, p_avg, order):
    """In-cell pressure at the source nodes and quadrature times.

    Values come from the reconstruction and a local Cauchy-Kowalewski Taylor
    series in time; where that is not positive the cell-average pressure is
    used.  Returns ``out[k][m]`` for time ``taus[k]`` and node ``m``.
    """
    poly = CellPoly(coef, dx)
    second = order == 3
    per_node = []
    for xi in duct.source_nodes[order]:
        xc = duct.x_c + xi * dx
        g = duct.geom.dlogA(xc) * np.ones(xc.shape)
        gp = duct.geom.d_dlogA(xc) * np.ones(xc.shape)
        U = poly.value(xi)
        ok = _physical(U)
        U = np.where(ok[:, None], U, poly.mean())
        q, qx, qxx = primitive_jets(U, poly.dx1(xi), poly.dx2() if second else None, gam)
        jets = ck_jets(q, qx, qxx, g, gp, gam)
        per_node.append((q, jets))
    out = []
    for tau in taus:
        row = []
        for q, jets in per_node:
            p = q[:, 2] + tau * jets.qt[:, 2]
            if jets.qtt is not None:
                p = p + 0.5 * tau * tau * jets.qtt[:, 2]
            row.append(np.where(np.isfinite(p) & (p > POSITIVITY_FLOOR), p, p_avg))
        out.append(row)
    return out


def step_grp2(state: FlowState, config: SchemeConfig, dt: float | None = None):
    """Second-order GRP step; returns ``(new_state, StepInfo)``."""
    if config.order != 2:
        config = SchemeConfig(**{**config.__dict__, "order": 2})
    return _step(state, config, dt)


def step_grp3(state: FlowState, config: SchemeConfig, dt: float | None = None):
    """Third-order GRP step; returns ``(new_state, StepInfo)``."""
    if config.order != 3:
        config = SchemeConfig(**{**config.__dict__, "order": 3})
    return _step(state, config, dt)


# -- driver -------------------------------------------------------------------

def initial_state(case: CaseSpec, n_cells: int | None = None) -> FlowState:
    """Area-weighted Gauss averages of the case's initial data."""
    n = case.n_cells if n_cells is None else n_cells
    grid = Grid(case.domain[0], case.domain[1], n)
    e = grid.edges
    xg, wg = np.polynomial.legendre.leggauss(6)
    mid, half = 0.5 * (e[:-1] + e[1:]), 0.5 * grid.dx
    pts = mid[:, None] + half * xg[None, :]
    A = np.asarray(case.geometry.area(pts), dtype=float) * np.ones(pts.shape)
    U = prim_to_cons(case.initial(pts), case.gamma)
    Ubar = np.einsum("nk,nkc,k->nc", A, U, wg) / (A @ wg)[:, None]
    return FlowState(Ubar, grid, case.geometry, 0.0)


@dataclass
class RunResult:
    state: FlowState
    config: SchemeConfig
    times: np.ndarray
    dts: np.ndarray
    totals: np.ndarray        # (steps + 1, 3) integrals of A U
    residuals: np.ndarray     # max |U^{n+1} - U^n| / dt per step
    fallbacks: int
    snapshots: dict
    shortened: np.ndarray     # steps cut short to land on an output time

    def steady_residual(self) -> np.ndarray:
        """Residual history over full CFL steps.

        The GRP flux depends on ``dt`` at second order, so a shortened step
        moves even a converged discrete steady state; those are left out.
        """
        return self.residuals[~self.shortened]

    @property
    def steps(self) -> int:
        return self.dts.size

    def primitive(self) -> np.ndarray:
        return self.state.primitive(self.config.gamma)


def run(case: CaseSpec, config: SchemeConfig | None = None, n_cells: int | None = None,
        snapshot_times=(), max_steps: int = 10 ** 7, fixed_dt: float | None = None,
        state: FlowState | None = None) -> RunResult:
    """Advance ``case`` to ``config.t_end``; the last step is shortened to land on it."""
    config = SchemeConfig.for_case(case) if config is None else config
    state = initial_state(case, n_cells) if state is None else state
    duct = _DuctData(state.grid, state.geometry)
    gam = config.gamma
    snaps = sorted(float(s) for s in snapshot_times if s <= config.t_end)
    out_snaps = {}
    times, dts, res, short = [state.t], [], [], []
    totals = [duct.vol @ state.U]
    fb = 0
    steps = 0
    while state.t < config.t_end * (1 - 1e-14) and steps < max_steps:
        q = state.primitive(gam)
        dt = fixed_dt if fixed_dt is not None else compute_dt(q, state.grid, config.cfl, gam)
        target = snaps[0] if snaps else config.t_end
        # absorb a sliver of remaining time rather than taking a micro step
        last = dt * (1.0 + END_SLACK) >= target - state.t
        if last:
            dt = target - state.t
        state, info = _step(state, config, dt, duct)
        if last:
            state.t = target
        if snaps and state.t >= snaps[0]:
            out_snaps[snaps.pop(0)] = state.U.copy()
        steps += 1
        fb += info.fallbacks
        times.append(state.t)
        dts.append(info.dt)
        res.append(info.residual)
        short.append(bool(last) and fixed_dt is None)
        totals.append(duct.vol @ state.U)
    log.info("%s order %d: %d steps, %d fallbacks", case.name, config.order, steps, fb)
    return RunResult(state, config, np.array(times), np.array(dts), np.array(totals),
                     np.array(res), fb, out_snaps, np.array(short, dtype=bool))
