"""Accuracy of the GRP time expansions against a reference series at ``x = 0``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grp
from .cases import CaseSpec
from .gas import prim_to_cons, riemann_invariants
from .reference import ReferenceSeries

# solver label -> (GRP order, mode)
SOLVERS = {
    "lgrp1": (1, "acoustic"),
    "lgrp_inf": (1, "exact"),
    "qgrp1": (2, "acoustic"),
    "qgrp_inf": (2, "exact"),
}


@dataclass
class ConvergenceTable:
    case: str
    solver: str
    norm: str
    times: np.ndarray
    errors: np.ndarray
    orders: np.ndarray      # NaN in the first row
    newton_iterations: list

    def rows(self):
        for t, e, o in zip(self.times, self.errors, self.orders):
            yield float(t), float(e), float(o)


def convergence_orders(times, errors) -> np.ndarray:
    """Observed orders between consecutive entries; the first entry is NaN."""
    t = np.asarray(times, dtype=float)
    e = np.asarray(errors, dtype=float)
    out = np.full(t.shape, np.nan)
    out[1:] = np.log(e[:-1] / e[1:]) / np.log(t[:-1] / t[1:])
    return out


def _norm_values(q, norm, gamma):
    if norm == "Phi":
        return np.stack(riemann_invariants(q, gamma), axis=-1)
    return prim_to_cons(q, gamma)


def solver_errors(case: CaseSpec, ref: ReferenceSeries, solver: str,
                  times=None) -> ConvergenceTable:
    """L-infinity errors over the components of ``U`` (or ``Phi`` for the sonic case)."""
    order, mode = SOLVERS[solver]
    times = np.asarray(case.times if times is None else times, dtype=float)
    sol = grp.solve(case.grp_input(), order, mode)
    errs = []
    for t in times:
        q_ref = ref.at(t)[0]
        if case.norm == "Phi":
            a = _norm_values(sol.at(np.array([t]))[0], "Phi", case.gamma)
            b = _norm_values(q_ref, "Phi", case.gamma)
        else:
            a = sol.conserved_at(np.array([t]))[0]
            b = prim_to_cons(q_ref, case.gamma)
        errs.append(float(np.max(np.abs(a - b))))
    errs = np.array(errs)
    return ConvergenceTable(case.name, solver, case.norm, times, errs,
                            convergence_orders(times, errs), sol.newton_iterations())


@dataclass
class SchemeConvergence:
    order: int
    n_cells: np.ndarray
    l1: np.ndarray
    linf: np.ndarray

    @property
    def l1_orders(self) -> np.ndarray:
        return convergence_orders(1.0 / self.n_cells, self.l1)

    @property
    def linf_orders(self) -> np.ndarray:
        return convergence_orders(1.0 / self.n_cells, self.linf)


def exact_cell_averages(exact, edges, t, n_gauss: int = 6) -> np.ndarray:
    """Gauss cell averages of ``exact(x, t)`` (primitive, planar)."""
    xg, wg = np.polynomial.legendre.leggauss(n_gauss)
    mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * np.diff(edges)
    pts = mid[:, None] + half[:, None] * xg[None, :]
    vals = exact(pts.ravel(), t).reshape(pts.shape + (-1,))
    return 0.5 * np.einsum("nkc,k->nc", vals, wg)


def smooth_convergence(order: int, levels=(20, 40, 80, 160), cfl: float = 0.5) -> SchemeConvergence:
    """Density errors of the scheme on the periodic smooth wave after one period."""
    from . import cases, scheme

    l1, linf = [], []
    for n in levels:
        case = cases.smooth_wave_case(n)
        res = scheme.run(case, scheme.SchemeConfig.for_case(case, order=order, cfl=cfl))
        grid = res.state.grid
        rho_ex = exact_cell_averages(cases.smooth_wave_exact, grid.edges, case.t_end)[:, 0]
        err = np.abs(res.state.U[:, 0] - rho_ex)
        l1.append(float(np.sum(err) * grid.dx))
        linf.append(float(np.max(err)))
    return SchemeConvergence(order, np.asarray(levels, dtype=float), np.array(l1), np.array(linf))
