"""Independent numerical oracles.

* :func:`rk_lq_oracle` integrates the fan transport equations for the
  invariants ``w = (S, psi)`` in generic matrix form with an adaptive
  Runge-Kutta method.  It uses only :mod:`ductgrp.gas` primitives, never the
  closed forms of :mod:`ductgrp.fan`.
* :func:`fd_time_derivs` estimates one-sided time derivatives of a sampled
  series by Richardson-extrapolated polynomial fits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StiffnessFailure
from .gas import invariant_gradients, invariants_to_prim


def _fan_state(S, psi, beta, gam):
    c = (gam - 1.0) / (gam + 1.0) * (psi - beta)
    return invariants_to_prim(S, psi, psi - 4.0 * c / (gam - 1.0), gam)


def _B_minus(q, gam):
    rho, u, p = q
    c = np.sqrt(gam * p / rho)
    S = p * rho ** (-gam)
    return np.array([[u, 0.0], [-c * c / (gam * (gam - 1.0) * S), u + c]])


def _oracle_rhs_factory(S_L, psi_L, g, gp, gam, second):
    def state_derivs(beta, y):
        """DQ from (D S, D psi, D phi) plus helper quantities at one beta."""
        q = _fan_state(S_L, psi_L, beta, gam)
        rho, u, p = q
        c = np.sqrt(gam * p / rho)
        a, b = y[0], y[1]
        dphi = -c / (gam * (gam - 1.0) * S_L) * a + g * c * u
        W = invariant_gradients(q, gam)
        DQ = np.linalg.solve(W, np.array([a, b, dphi]))
        return q, c, u, DQ, dphi

    def rhs(beta, y):
        q, c, u, DQ, dphi = state_derivs(beta, y)
        lam = u - c
        M = lam * np.eye(2) - _B_minus(q, gam)
        P = np.linalg.inv(M)
        H = np.array([0.0, -g * c * u])
        w1 = y[:2]
        dw1 = P @ (w1 - H)
        if not second:
            return dw1
        rho, _, p = q
        dc = 0.5 * c * (DQ[2] / p - DQ[0] / rho)
        du = DQ[1]
        dlam = du - dc
        S = p * rho ** (-gam)
        dS = w1[0]
        # D(c^2/(gamma(gamma-1)S))
        dk = (2 * c * dc / S - c * c * dS / S ** 2) / (gam * (gam - 1.0))
        DM = np.array([[dlam - du, 0.0], [dk, dlam - du - dc]])
        DP = -P @ DM @ P
        DH = np.array([0.0, -(gp * beta) * c * u - g * (dc * u + c * du)])
        DPH = DP @ H + P @ DH
        # d/dbeta of D lambda, by the chain rule through c(beta), u(beta)
        kap = (gam - 1.0) / (gam + 1.0)
        dc_db, du_db = -kap, 1.0 - kap
        a = y[0]
        da_db, db_db = dw1
        dphi_db = (-(dc_db * a + c * da_db) / (gam * (gam - 1.0) * S_L)
                   + g * (dc_db * u + c * du_db))
        ddlam = 0.25 * (3.0 - gam) * db_db + 0.25 * (1.0 + gam) * dphi_db
        w2 = y[2:]
        dw2 = 2 * P @ w2 + 2 * DP @ w1 - 2 * DPH + ddlam * (P @ w1 - P @ H)
        return np.concatenate([dw1, dw2])

    return rhs


@dataclass
class OracleSeries:
    beta: np.ndarray
    dlam_w: np.ndarray          # (K, 2)
    dlam2_w: np.ndarray | None  # (K, 2)


def rk_lq_oracle(qL, head, beta_grid, g0=0.0, gp0=0.0, gamma=1.4, rtol=1e-12,
                 atol=1e-14) -> OracleSeries:
    """Integrate the fan equations for a single fan from its head.

    Parameters
    ----------
    qL : (3,) primitive state at the fan head.
    head : sequence
        ``(D S, D psi)`` or ``(D S, D psi, D^2 S, D^2 psi)`` at the head.
    beta_grid : increasing array starting at the head slope.
    """
    qL = np.asarray(qL, dtype=float)
    gam = float(gamma)
    rho, u, p = qL
    c = np.sqrt(gam * p / rho)
    S_L = p * rho ** (-gam)
    psi_L = u + 2 * c / (gam - 1.0)
    head = np.asarray(head, dtype=float)
    second = head.size == 4
    beta_grid = np.asarray(beta_grid, dtype=float)
    rhs = _oracle_rhs_factory(S_L, psi_L, float(g0), float(gp0), gam, second)
    if beta_grid[-1] == beta_grid[0]:
        y = np.tile(head, (beta_grid.size, 1))
    else:
        scale = np.maximum(np.abs(head), 1e-300)
        sol = solve_ivp(rhs, (beta_grid[0], beta_grid[-1]), head, method="DOP853",
                        t_eval=beta_grid, rtol=rtol, atol=atol * np.max(scale) + 1e-300,
                        dense_output=False)
        if not sol.success:
            raise StiffnessFailure(sol.message)
        y = sol.y.T
    return OracleSeries(beta_grid, y[:, :2], y[:, 2:] if second else None)


@dataclass
class TimeDerivEstimate:
    dt: np.ndarray
    dt2: np.ndarray
    dt_err: np.ndarray
    dt2_err: np.ndarray


def fd_time_derivs(t, values, degree: int = 4) -> TimeDerivEstimate:
    """First and second time derivatives at ``t = 0`` of a sampled series.

    Least-squares polynomials of degree ``degree`` are fitted on the full
    window and on its first half; their difference serves as error bar and
    the Richardson-combined value as the estimate.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]

    def fit(tt, vv):
        V = np.vander(tt, degree + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(V, vv, rcond=None)
        return coef[1], 2 * coef[2]

    d1a, d2a = fit(t, v)
    half = t <= t[0] + 0.5 * (t[-1] - t[0])
    if half.sum() > degree + 1:
        d1b, d2b = fit(t[half], v[half])
    else:
        d1b, d2b = d1a, d2a
    p = degree  # truncation error of the fitted derivative scales like h^(p)
    w = 2.0 ** p
    d1 = (w * d1b - d1a) / (w - 1.0)
    d2 = (w * d2b - d2a) / (w - 1.0)
    return TimeDerivEstimate(d1.squeeze(), d2.squeeze(), np.abs(d1b - d1a).squeeze(),
                             np.abs(d2b - d2a).squeeze())
