"""Generalized Riemann problem solvers for the duct Euler equations.

The solvers take piecewise-smooth data at an interface (limit values and the
first, optionally second, one-sided spatial derivatives) and return the
solution on the t-axis together with its first (LGRP) or first and second
(QGRP) time derivatives.

Every call handles a whole batch of interfaces.  The eight unknowns of each
linear system are ordered ``[D sigma_L, Q_x(L*), D sigma_R, Q_x(R*)]``
(second level: ``D^2 sigma`` and ``Q_xx``); a wave that is not a shock
contributes the trivial row ``D sigma = 0``.  Left-going shocks and
right-going rarefactions are expressed through the mirror map
``(rho, u, p, A)(x, t) -> (rho, -u, p, A)(-x, t)`` so that only a left fan
and a right shock are ever implemented directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import linsolve, riemann
from .errors import NewtonDivergence
from .fan import FanSetup, FanSolution
from .gas import (GasModel, _arr, _gamma, cons_to_prim, conserved_jacobians, invariant_gradients,
                  invariants_to_prim, prim_to_cons, primitive_jacobian, source_from_dlogA)
from .jets import along, ck_jets, conserved_taylor, flux_derivs, invariant_derivs
from .riemann import Region, WaveKind

#: parity of (rho, u, p) under the mirror map, for values and second derivatives
T_EVEN = np.array([1.0, -1.0, 1.0])
#: parity of first spatial derivatives
T_ODD = np.array([-1.0, 1.0, -1.0])

NEWTON_TOL = 1e-7
NEWTON_MAX = 20
ACOUSTIC_TOL = 1e-6
WEAK_SHOCK_TOL = 1e-8
CONTACT_TIE_TOL = 1e-14


def _mv(M, v):
    return np.einsum("...ij,...j->...i", M, v)


def _mm(A, B):
    return np.einsum("...ij,...jk->...ik", A, B)


@dataclass(frozen=True)
class GRPInput:
    """Interface data for a batch of generalized Riemann problems.

    ``qL``/``qR`` and their derivatives have shape ``(N, 3)`` (a single
    problem may be given with shape ``(3,)``); ``g0`` is ``A'/A`` and ``gp0``
    its derivative at the interface.
    """

    qL: np.ndarray
    qR: np.ndarray
    dqL: np.ndarray
    dqR: np.ndarray
    d2qL: np.ndarray | None = None
    d2qR: np.ndarray | None = None
    g0: np.ndarray | float = 0.0
    gp0: np.ndarray | float = 0.0
    gas: GasModel = field(default_factory=GasModel)

    @classmethod
    def create(cls, qL, qR, dqL=None, dqR=None, d2qL=None, d2qR=None, g0=0.0, gp0=0.0,
               gas=None) -> "GRPInput":
        qL, qR = np.broadcast_arrays(np.atleast_2d(_arr(qL)), np.atleast_2d(_arr(qR)))
        n = qL.shape[0]

        def d(x):
            if x is None:
                return None
            return np.broadcast_to(np.atleast_2d(np.asarray(x, dtype=float)), (n, 3)).copy()

        zero = np.zeros((n, 3))
        gas = GasModel() if gas is None else (gas if isinstance(gas, GasModel) else GasModel(gas))
        return cls(qL.copy(), qR.copy(), zero if dqL is None else d(dqL),
                   zero if dqR is None else d(dqR), d(d2qL), d(d2qR),
                   np.broadcast_to(np.asarray(g0, dtype=float), (n,)).copy(),
                   np.broadcast_to(np.asarray(gp0, dtype=float), (n,)).copy(), gas)

    @property
    def size(self) -> int:
        return self.qL.shape[0]

    @property
    def has_second(self) -> bool:
        return self.d2qL is not None and self.d2qR is not None

    def take(self, idx) -> "GRPInput":
        def t(x):
            return None if x is None else x[idx]
        return GRPInput(self.qL[idx], self.qR[idx], self.dqL[idx], self.dqR[idx], t(self.d2qL),
                        t(self.d2qR), self.g0[idx], self.gp0[idx], self.gas)


def mirror(inp: GRPInput) -> GRPInput:
    """Image of the problem under ``x -> -x``, ``u -> -u`` (an involution)."""
    def m2(x):
        return None if x is None else x * T_EVEN
    return GRPInput(inp.qR * T_EVEN, inp.qL * T_EVEN, inp.dqR * T_ODD, inp.dqL * T_ODD,
                    m2(inp.d2qR), m2(inp.d2qL), -inp.g0, inp.gp0.copy(), inp.gas)


@dataclass
class SonicExpansion:
    """Characteristic expansion through a sonic fan for a subset of the batch."""

    index: np.ndarray
    fan: FanSolution
    mirrored: bool = False
    iterations: list = field(default_factory=list)

    def root(self, t):
        """Foot ``beta*`` of the characteristic reaching ``(0, t)``; returns (beta, iters)."""
        t = np.broadcast_to(np.asarray(t, dtype=float), self.index.shape)
        f = self.fan
        lo, hi = f.setup.beta_L, f.setup.beta_R
        beta = np.zeros(self.index.shape)
        it = 0
        for it in range(1, NEWTON_MAX + 1):
            b = np.clip(beta, lo, hi)
            res = b + 0.5 * t * f.dlam_lambda(b, check=False)
            jac = 1.0 + 0.5 * t * f.ddbeta_dlam_lambda(b, check=False)
            beta = np.clip(b - res / jac, lo, hi)
            # a root pushed past the fan edge settles on the edge
            if np.all(np.abs(beta - b) <= NEWTON_TOL):
                break
        else:
            raise NewtonDivergence(f"sonic root not found in {NEWTON_MAX} iterations")
        self.iterations.append(it)
        return np.clip(beta, lo, hi), it

    def state(self, t):
        """Primitive state at ``(0, t)`` in the frame of this expansion."""
        t = np.broadcast_to(np.asarray(t, dtype=float), self.index.shape)
        beta, _ = self.root(t)
        Phi, d1, d2 = self.fan.invariants_along(beta, check=False)
        tt = t[..., None]
        Phi = Phi + tt * d1 + 0.5 * tt * tt * d2
        return invariants_to_prim(Phi[..., 0], Phi[..., 1], Phi[..., 2], self.fan.gamma)


@dataclass
class GRPSolution:
    """Solution on the t-axis for a batch of interfaces.

    ``dt2Q`` holds NaN for sonic entries: there the second time derivative
    is unbounded and :meth:`at` switches to the characteristic expansion.
    """

    q0: np.ndarray
    dtQ: np.ndarray
    dt2Q: np.ndarray | None
    pattern: riemann.RiemannFan | None
    region: np.ndarray
    shock_accel: np.ndarray          # (N, 2): D sigma for the left/right wave (NaN if no shock)
    shock_accel2: np.ndarray | None  # (N, 2): D^2 sigma
    gamma: float
    mode: str
    sonic: list = field(default_factory=list)
    qx_star: np.ndarray | None = None   # (N, 2, 3) spatial derivatives left/right of contact
    qxx_star: np.ndarray | None = None

    @property
    def order(self) -> int:
        return 2 if self.dt2Q is not None else 1

    def conserved_at(self, t) -> np.ndarray:
        """Conserved state at ``(0, t)`` without a positivity check."""
        t = np.asarray(t, dtype=float)
        tt = t[..., None] if t.ndim else t
        U0, Ut, Utt = conserved_taylor(self.q0, self.dtQ, self.dt2Q, self.gamma)
        U = U0 + tt * Ut
        if Utt is not None:
            U = U + 0.5 * tt * tt * np.nan_to_num(Utt)
            for sx in self.sonic:
                ts = t[sx.index] if t.ndim else t
                q = sx.state(ts)
                if sx.mirrored:
                    q = q * T_EVEN
                U[sx.index] = prim_to_cons(q, self.gamma)
        return U

    def at(self, t) -> np.ndarray:
        """Primitive state at ``(0, t)``."""
        return cons_to_prim(self.conserved_at(t), self.gamma)

    def newton_iterations(self) -> list:
        out = []
        for sx in self.sonic:
            out.extend(sx.iterations)
        return out


def unmirror(sol: GRPSolution) -> GRPSolution:
    """Map a solution of a mirrored problem back to the original frame."""
    sonic = [replace(sx, mirrored=not sx.mirrored) for sx in sol.sonic]
    qx = None if sol.qx_star is None else sol.qx_star[:, ::-1] * T_ODD
    qxx = None if sol.qxx_star is None else sol.qxx_star[:, ::-1] * T_EVEN
    reg_map = np.array([Region.RIGHT, Region.STAR_RIGHT, Region.STAR_LEFT, Region.LEFT,
                        Region.SONIC_RIGHT, Region.SONIC_LEFT])
    return GRPSolution(
        q0=sol.q0 * T_EVEN, dtQ=sol.dtQ * T_EVEN,
        dt2Q=None if sol.dt2Q is None else sol.dt2Q * T_EVEN,
        pattern=None, region=reg_map[sol.region], shock_accel=-sol.shock_accel[:, ::-1],
        shock_accel2=None if sol.shock_accel2 is None else -sol.shock_accel2[:, ::-1],
        gamma=sol.gamma, mode=sol.mode, sonic=sonic, qx_star=qx, qxx_star=qxx)


# ---------------------------------------------------------------------------
# rows of the linear systems

def _rare_rows1(q, beta, g, gam, dw_tail):
    """Transport of (S, psi) across the fan tail: 2 rows in Q_x of the star state."""
    W = invariant_gradients(q, gam)[..., :2, :]
    J = primitive_jacobian(q, gam)
    M = beta[..., None, None] * np.eye(3) - J
    H = source_from_dlogA(q, g, gam)
    return _mm(W, M), dw_tail - _mv(W, H)


def _rare_rows2(q, qx, g, gp, gam, d2w_tail):
    W = invariant_gradients(q, gam)[..., :2, :]
    J = primitive_jacobian(q, gam)
    lam = q[..., 1] - np.sqrt(gam * q[..., 2] / q[..., 0])
    K = J - lam[..., None, None] * np.eye(3)
    jets = ck_jets(q, qx, np.zeros_like(qx), g, gp, gam)
    _, B = invariant_derivs(q, along(jets, lam, family=-1, gamma=gam), gam)
    return _mm(W, _mm(K, K)), d2w_tail - B[..., :2]


def _shock_rows1(q_in, q_out, dq_out, sigma, g, gam):
    """Time derivative of the Rankine-Hugoniot relation of a right-facing shock."""
    s = sigma[..., None, None]
    eye = np.eye(3)
    dU_i, dF_i = conserved_jacobians(q_in, gam)
    dU_o, dF_o = conserved_jacobians(q_out, gam)
    Ki = dF_i - s * dU_i
    Ko = dF_o - s * dU_o
    coef_qx = _mm(Ki, s * eye - primitive_jacobian(q_in, gam))
    coef_ds = -(prim_to_cons(q_in, gam) - prim_to_cons(q_out, gam))
    rhs = (_mv(_mm(Ko, s * eye - primitive_jacobian(q_out, gam)), dq_out)
           + _mv(Ko, source_from_dlogA(q_out, g, gam)) - _mv(Ki, source_from_dlogA(q_in, g, gam)))
    return coef_ds, coef_qx, rhs


def _shock_rows2(q_in, qx_in, q_out, dq_out, d2q_out, sigma, dsig, g, gp, gam):
    s = sigma[..., None, None]
    dU_i, dF_i = conserved_jacobians(q_in, gam)
    K = primitive_jacobian(q_in, gam) - s * np.eye(3)
    coef_qxx = _mm(dF_i - s * dU_i, _mm(K, K))
    coef_d2s = -(prim_to_cons(q_in, gam) - prim_to_cons(q_out, gam))
    jin = ck_jets(q_in, qx_in, np.zeros_like(qx_in), g, gp, gam)
    _, B_in = flux_derivs(q_in, along(jin, sigma, dlam=dsig), sigma, gam)
    jout = ck_jets(q_out, dq_out, d2q_out, g, gp, gam)
    _, D_out = flux_derivs(q_out, along(jout, sigma, dlam=dsig), sigma, gam)
    return coef_d2s, coef_qxx, D_out - B_in


def _contact_rows1(qa, qb, g, gam):
    def part(q):
        J = primitive_jacobian(q, gam)[..., 1:, :]
        M = -J.copy()
        M[..., 0, 1] += q[..., 1]
        M[..., 1, 2] += q[..., 1]
        return M, source_from_dlogA(q, g, gam)[..., 1:]
    Ma, Ha = part(qa)
    Mb, Hb = part(qb)
    return Ma, -Mb, -Ha + Hb


def _contact_rows2(qa, qxa, qb, qxb, g, gp, gam):
    def part(q, qx):
        J = primitive_jacobian(q, gam)
        K = J - q[..., 1][..., None, None] * np.eye(3)
        jets = ck_jets(q, qx, np.zeros_like(qx), g, gp, gam)
        d = along(jets, q[..., 1], family=0, gamma=gam)
        return _mm(K, K)[..., 1:, :], d.d2[..., 1:]
    Ma, Ba = part(qa, qxa)
    Mb, Bb = part(qb, qxb)
    return Ma, -Mb, Bb - Ba


# ---------------------------------------------------------------------------
# wave pattern preparation

@dataclass
class _Pattern:
    qLs: np.ndarray
    qRs: np.ndarray
    q_left: np.ndarray       # state used for the region left of all waves
    q_right: np.ndarray
    shock_L: np.ndarray
    shock_R: np.ndarray
    sigma_L: np.ndarray
    sigma_R: np.ndarray
    tail_L: np.ndarray       # lambda_- at the left tail
    tail_Rm: np.ndarray      # mirrored lambda_- at the right tail (= -lambda_+)
    fan_L: FanSolution | None
    fan_Rm: FanSolution | None
    region: np.ndarray
    riemann_fan: riemann.RiemannFan | None


def _head_derivs(q, dq, d2q, g, gp, gam):
    """``D w`` and ``D^2 w`` of (S, psi) along lambda_- at a smooth point."""
    jets = ck_jets(q, dq, d2q, g, gp, gam)
    d = along(jets, q[..., 1] - np.sqrt(gam * q[..., 2] / q[..., 0]), family=-1, gamma=gam)
    d1, d2 = invariant_derivs(q, d, gam)
    return d1[..., :2], None if d2 is None else d2[..., :2]


def _exact_pattern(inp: GRPInput, fan: riemann.RiemannFan, second: bool) -> _Pattern:
    gam = inp.gas.gamma
    # very weak shocks leave the D sigma column near-singular; they are
    # treated as characteristics, an O(strength) perturbation
    weak_L = np.abs(fan.p_star - inp.qL[:, 2]) < WEAK_SHOCK_TOL * inp.qL[:, 2]
    weak_R = np.abs(fan.p_star - inp.qR[:, 2]) < WEAK_SHOCK_TOL * inp.qR[:, 2]
    shock_L = (fan.left_kind == WaveKind.SHOCK) & ~weak_L
    shock_R = (fan.right_kind == WaveKind.SHOCK) & ~weak_R
    head_L = inp.qL[:, 1] - np.sqrt(gam * inp.qL[:, 2] / inp.qL[:, 0])
    head_Rm = -inp.qR[:, 1] - np.sqrt(gam * inp.qR[:, 2] / inp.qR[:, 0])
    tail_L = np.where(shock_L, fan.left_head, np.where(weak_L, head_L, fan.left_tail))
    tail_Rm = np.where(shock_R, -fan.right_head, np.where(weak_R, head_Rm, -fan.right_tail))
    fsL = FanSetup(inp.qL, inp.dqL, inp.d2qL if second else None, head_L,
                   np.where(shock_L, head_L, tail_L), inp.g0, inp.gp0, inp.gas)
    fsR = FanSetup(inp.qR * T_EVEN, inp.dqR * T_ODD,
                   inp.d2qR * T_EVEN if second else None, head_Rm,
                   np.where(shock_R, head_Rm, tail_Rm), -inp.g0, inp.gp0, inp.gas)
    return _Pattern(fan.q_star_L, fan.q_star_R, inp.qL, inp.qR, shock_L, shock_R,
                    np.where(shock_L, fan.left_head, 0.0), np.where(shock_R, fan.right_head, 0.0),
                    fsL.beta_R, fsR.beta_R, FanSolution(fsL, second), FanSolution(fsR, second),
                    riemann.classify_t_axis(fan), fan)


def _acoustic_pattern(inp: GRPInput) -> _Pattern:
    gam = inp.gas.gamma
    Us = 0.5 * (prim_to_cons(inp.qL, gam) + prim_to_cons(inp.qR, gam))
    qs = cons_to_prim(Us, gam)
    c = np.sqrt(gam * qs[:, 2] / qs[:, 0])
    u = qs[:, 1]
    region = np.where(u - c >= 0, Region.LEFT, np.where(u >= 0, Region.STAR_LEFT,
                      np.where(u + c > 0, Region.STAR_RIGHT, Region.RIGHT))).astype(int)
    n = inp.size
    f = np.zeros(n, dtype=bool)
    return _Pattern(qs, qs, qs, qs, f, f, np.zeros(n), np.zeros(n), u - c, -(u + c), None, None,
                    region, None)


def _fan_tails(pat: _Pattern, inp: GRPInput, second: bool):
    """Directional derivatives of (S, psi) at the two tails (right one mirrored)."""
    gam = inp.gas.gamma
    if pat.fan_L is None:
        # zero-width fans: derivatives along the characteristic are continuous
        d1L, d2L = _head_derivs(pat.qLs, inp.dqL, inp.d2qL if second else None, inp.g0,
                                inp.gp0, gam)
        d1R, d2R = _head_derivs(pat.qRs * T_EVEN, inp.dqR * T_ODD,
                                inp.d2qR * T_EVEN if second else None, -inp.g0, inp.gp0, gam)
        return d1L, d2L, d1R, d2R
    d1L = pat.fan_L.dlam_w(pat.tail_L, check=False)
    d1R = pat.fan_Rm.dlam_w(pat.tail_Rm, check=False)
    d2L = pat.fan_L.dlam2_w(pat.tail_L, check=False) if second else None
    d2R = pat.fan_Rm.dlam2_w(pat.tail_Rm, check=False) if second else None
    return d1L, d2L, d1R, d2R


def _assemble1(pat: _Pattern, inp: GRPInput, d1L, d1R):
    gam = inp.gas.gamma
    n = inp.size
    g = inp.g0
    A = np.zeros((n, 8, 8))
    r = np.zeros((n, 8))

    # left wave: rows 0..2, unknowns 0 (D sigma_L) and 1..3 (Q_x at L*)
    cR, rR = _rare_rows1(pat.qLs, pat.tail_L, g, gam, d1L)
    blk = np.zeros((n, 3, 8))
    rb = np.zeros((n, 3))
    blk[:, :2, 1:4] = cR
    rb[:, :2] = rR
    blk[:, 2, 0] = 1.0
    ds, cq, rs = _shock_rows1(pat.qLs * T_EVEN, inp.qL * T_EVEN, inp.dqL * T_ODD,
                              -pat.sigma_L, -g, gam)
    sblk = np.zeros((n, 3, 8))
    sblk[:, :, 0] = -ds
    sblk[:, :, 1:4] = cq * T_ODD
    m = pat.shock_L
    A[:, 0:3] = np.where(m[:, None, None], sblk, blk)
    r[:, 0:3] = np.where(m[:, None], rs, rb)

    # contact: rows 3, 4
    ca, cb, rc = _contact_rows1(pat.qLs, pat.qRs, g, gam)
    A[:, 3:5, 1:4] = ca
    A[:, 3:5, 5:8] = cb
    r[:, 3:5] = rc

    # right wave: rows 5..7, unknowns 4 (D sigma_R) and 5..7 (Q_x at R*)
    ds, cq, rs = _shock_rows1(pat.qRs, inp.qR, inp.dqR, pat.sigma_R, g, gam)
    sblk = np.zeros((n, 3, 8))
    sblk[:, :, 4] = ds
    sblk[:, :, 5:8] = cq
    cR, rR = _rare_rows1(pat.qRs * T_EVEN, pat.tail_Rm, -g, gam, d1R)
    blk = np.zeros((n, 3, 8))
    rb = np.zeros((n, 3))
    blk[:, :2, 5:8] = cR * T_ODD
    rb[:, :2] = rR
    blk[:, 2, 4] = 1.0
    m = pat.shock_R
    A[:, 5:8] = np.where(m[:, None, None], sblk, blk)
    r[:, 5:8] = np.where(m[:, None], rs, rb)
    return A, r


def _assemble2(pat: _Pattern, inp: GRPInput, z1, d2L, d2R):
    gam = inp.gas.gamma
    n = inp.size
    g, gp = inp.g0, inp.gp0
    dsL, qxL, dsR, qxR = z1[:, 0], z1[:, 1:4], z1[:, 4], z1[:, 5:8]
    A = np.zeros((n, 8, 8))
    r = np.zeros((n, 8))

    cR, rR = _rare_rows2(pat.qLs, qxL, g, gp, gam, d2L)
    blk = np.zeros((n, 3, 8))
    rb = np.zeros((n, 3))
    blk[:, :2, 1:4] = cR
    rb[:, :2] = rR
    blk[:, 2, 0] = 1.0
    ds, cq, rs = _shock_rows2(pat.qLs * T_EVEN, qxL * T_ODD, inp.qL * T_EVEN, inp.dqL * T_ODD,
                              inp.d2qL * T_EVEN, -pat.sigma_L, -dsL, -g, gp, gam)
    sblk = np.zeros((n, 3, 8))
    sblk[:, :, 0] = -ds
    sblk[:, :, 1:4] = cq * T_EVEN
    m = pat.shock_L
    A[:, 0:3] = np.where(m[:, None, None], sblk, blk)
    r[:, 0:3] = np.where(m[:, None], rs, rb)

    ca, cb, rc = _contact_rows2(pat.qLs, qxL, pat.qRs, qxR, g, gp, gam)
    A[:, 3:5, 1:4] = ca
    A[:, 3:5, 5:8] = cb
    r[:, 3:5] = rc

    ds, cq, rs = _shock_rows2(pat.qRs, qxR, inp.qR, inp.dqR, inp.d2qR, pat.sigma_R, dsR, g, gp,
                              gam)
    sblk = np.zeros((n, 3, 8))
    sblk[:, :, 4] = ds
    sblk[:, :, 5:8] = cq
    cR, rR = _rare_rows2(pat.qRs * T_EVEN, qxR * T_ODD, -g, gp, gam, d2R)
    blk = np.zeros((n, 3, 8))
    rb = np.zeros((n, 3))
    blk[:, :2, 5:8] = cR * T_EVEN
    rb[:, :2] = rR
    blk[:, 2, 4] = 1.0
    m = pat.shock_R
    A[:, 5:8] = np.where(m[:, None, None], sblk, blk)
    r[:, 5:8] = np.where(m[:, None], rs, rb)
    return A, r


def _region_data(pat: _Pattern, inp: GRPInput, qx_star, qxx_star):
    reg = pat.region
    sel = [(Region.LEFT, pat.q_left, inp.dqL, inp.d2qL),
           (Region.STAR_LEFT, pat.qLs, qx_star[:, 0], None if qxx_star is None else qxx_star[:, 0]),
           (Region.STAR_RIGHT, pat.qRs, qx_star[:, 1],
            None if qxx_star is None else qxx_star[:, 1]),
           (Region.RIGHT, pat.q_right, inp.dqR, inp.d2qR)]
    q = np.full((inp.size, 3), np.nan)
    qx = np.full((inp.size, 3), np.nan)
    qxx = None if qxx_star is None else np.full((inp.size, 3), np.nan)
    for code, qs, dq, d2q in sel:
        m = reg == code
        q[m] = qs[m]
        qx[m] = dq[m]
        if qxx is not None:
            qxx[m] = d2q[m]
    return q, qx, qxx


def _break_contact_ties(pat: _Pattern, inp: GRPInput, qx_star, gam):
    """A contact resting on the t-axis: take the side it accelerates away from.

    Keeps the solution equivariant under the mirror map, which a fixed
    left-side convention would not be at second order.
    """
    u = pat.qLs[:, 1]
    c = np.sqrt(gam * pat.qLs[:, 2] / pat.qLs[:, 0])
    star = (pat.region == Region.STAR_LEFT) | (pat.region == Region.STAR_RIGHT)
    tie = star & (np.abs(u) <= CONTACT_TIE_TOL * c)
    if not tie.any():
        return
    # the contact acceleration is continuous, either side will do
    ut = ck_jets(pat.qLs, qx_star[:, 0], None, inp.g0, inp.gp0, gam).qt[:, 1]
    reg = np.where(tie & (ut > 0.0), int(Region.STAR_LEFT), pat.region)
    pat.region = np.where(tie & (ut < 0.0), int(Region.STAR_RIGHT), reg)


# ---------------------------------------------------------------------------
# drivers

def _solve_nonsonic(inp: GRPInput, pat: _Pattern, second: bool, mode: str) -> GRPSolution:
    gam = inp.gas.gamma
    d1L, d2L, d1R, d2R = _fan_tails(pat, inp, second)
    A, r = _assemble1(pat, inp, d1L, d1R)
    z1 = linsolve.solve(A, r)
    qx_star = np.stack([z1[:, 1:4], z1[:, 5:8]], axis=1)
    accel = np.stack([np.where(pat.shock_L, z1[:, 0], np.nan),
                      np.where(pat.shock_R, z1[:, 4], np.nan)], axis=1)
    qxx_star = None
    accel2 = None
    if second:
        A2, r2 = _assemble2(pat, inp, z1, d2L, d2R)
        z2 = linsolve.solve(A2, r2)
        qxx_star = np.stack([z2[:, 1:4], z2[:, 5:8]], axis=1)
        accel2 = np.stack([np.where(pat.shock_L, z2[:, 0], np.nan),
                           np.where(pat.shock_R, z2[:, 4], np.nan)], axis=1)
    _break_contact_ties(pat, inp, qx_star, gam)
    q, qx, qxx = _region_data(pat, inp, qx_star, qxx_star)
    jets = ck_jets(q, qx, qxx, inp.g0, inp.gp0, gam)
    return GRPSolution(q, jets.qt, jets.qtt, pat.riemann_fan, pat.region, accel, accel2, gam,
                       mode, [], qx_star, qxx_star)


def _solve_sonic_left(inp: GRPInput, second: bool, beta_R, index) -> GRPSolution:
    """Sonic case: the t-axis is the characteristic ``beta = 0`` of the left fan."""
    gam = inp.gas.gamma
    setup = FanSetup.create(inp.qL, inp.dqL, inp.d2qL if second else None, beta_R,
                            inp.g0, inp.gp0, inp.gas)
    fs = FanSolution(setup, second)
    zero = np.zeros(inp.size)
    q0 = fs.in_fan_state(zero, check=False)
    _, d1, _ = fs.invariants_along(zero, check=False)
    W = invariant_gradients(q0, gam)
    qt = np.linalg.solve(W, d1[..., None])[..., 0]
    n = inp.size
    nan2 = np.full((n, 2), np.nan)
    sol = GRPSolution(q0, qt, np.full((n, 3), np.nan) if second else None, None,
                      np.full(n, int(Region.SONIC_LEFT)), nan2, nan2.copy() if second else None,
                      gam, "exact", [], None, None)
    if second:
        sol.sonic.append(SonicExpansion(np.asarray(index), fs))
    return sol


def _merge(n, parts, second, gam, mode):
    """Combine partial solutions ``[(indices, GRPSolution), ...]`` into one batch."""
    q0 = np.full((n, 3), np.nan)
    dt = np.full((n, 3), np.nan)
    dt2 = np.full((n, 3), np.nan) if second else None
    reg = np.zeros(n, dtype=int)
    acc = np.full((n, 2), np.nan)
    acc2 = np.full((n, 2), np.nan) if second else None
    qx = np.full((n, 2, 3), np.nan)
    qxx = np.full((n, 2, 3), np.nan) if second else None
    sonic = []
    for idx, s in parts:
        if idx.size == 0:
            continue
        q0[idx] = s.q0
        dt[idx] = s.dtQ
        reg[idx] = s.region
        acc[idx] = s.shock_accel
        if s.qx_star is not None:
            qx[idx] = s.qx_star
        if second:
            dt2[idx] = s.dt2Q
            acc2[idx] = s.shock_accel2
            if s.qxx_star is not None:
                qxx[idx] = s.qxx_star
        for sx in s.sonic:
            sonic.append(replace(sx, index=idx[sx.index]))
    return GRPSolution(q0, dt, dt2, None, reg, acc, acc2, gam, mode, sonic, qx, qxx)


def solve(inp: GRPInput, order: int = 1, mode: str = "exact",
          acoustic_tol: float = ACOUSTIC_TOL) -> GRPSolution:
    """Solve a batch of generalized Riemann problems.

    Parameters
    ----------
    inp : GRPInput
    order : 1 for the linear solver (time derivative), 2 for the quadratic
        one (first and second time derivatives).
    mode : ``"exact"`` resolves the full nonlinear wave pattern;
        ``"acoustic"`` linearises about the average state; ``"auto"`` uses the
        acoustic branch only where the relative jump is below ``acoustic_tol``.

    Returns
    -------
    GRPSolution
    """
    second = order >= 2
    if second and not inp.has_second:
        raise ValueError("second derivatives are required for the quadratic solver")
    if mode not in ("exact", "acoustic", "auto"):
        raise ValueError(f"unknown mode {mode!r}")
    gam = inp.gas.gamma
    n = inp.size
    if mode == "acoustic":
        return _solve_nonsonic(inp, _acoustic_pattern(inp), second, mode)
    if mode == "auto":
        jump = np.linalg.norm(inp.qL - inp.qR, axis=1) / np.linalg.norm(inp.qL, axis=1)
        ac = jump < acoustic_tol
        if ac.any():
            idx_a = np.nonzero(ac)[0]
            idx_e = np.nonzero(~ac)[0]
            parts = [(idx_a, _solve_nonsonic(inp.take(idx_a),
                                             _acoustic_pattern(inp.take(idx_a)), second,
                                             "acoustic"))]
            if idx_e.size:
                parts.append((idx_e, solve(inp.take(idx_e), order, "exact")))
            return _merge(n, parts, second, gam, "auto")

    fan = riemann.solve(inp.qL, inp.qR, inp.gas)
    reg = riemann.classify_t_axis(fan)
    sl = reg == Region.SONIC_LEFT
    sr = reg == Region.SONIC_RIGHT
    if not (sl.any() or sr.any()):
        return _solve_nonsonic(inp, _exact_pattern(inp, fan, second), second, "exact")
    parts = []
    ns = np.nonzero(~(sl | sr))[0]
    if ns.size:
        sub = inp.take(ns)
        parts.append((ns, _solve_nonsonic(sub, _exact_pattern(sub, fan.take(ns), second),
                                          second, "exact")))
    il = np.nonzero(sl)[0]
    if il.size:
        parts.append((il, _solve_sonic_left(inp.take(il), second, fan.left_tail[il],
                                            np.arange(il.size))))
    ir = np.nonzero(sr)[0]
    if ir.size:
        msub = mirror(inp.take(ir))
        parts.append((ir, unmirror(_solve_sonic_left(msub, second, -fan.right_tail[ir],
                                                     np.arange(ir.size)))))
    out = _merge(n, parts, second, gam, "exact")
    out.pattern = fan
    return out


def solve_lgrp(inp: GRPInput, mode: str = "exact") -> GRPSolution:
    return solve(inp, 1, mode)


def solve_qgrp(inp: GRPInput, mode: str = "exact") -> GRPSolution:
    return solve(inp, 2, mode)


def taylor_eval(sol: GRPSolution, t) -> np.ndarray:
    return sol.at(t)


def solve_acoustic_derivs(inp: GRPInput) -> np.ndarray:
    """Star-region slopes from the characteristic decomposition about ``U*``.

    Returns an ``(N, 2, 3)`` array with the slopes left and right of the
    contact.  Only first derivatives are decomposed; this is the reference
    for the row-based acoustic branch of :func:`solve`.
    """
    gam = inp.gas.gamma
    Us = 0.5 * (prim_to_cons(inp.qL, gam) + prim_to_cons(inp.qR, gam))
    qs = cons_to_prim(Us, gam)
    lam, R = np.linalg.eig(primitive_jacobian(qs, gam))
    order = np.argsort(lam.real, axis=1)
    R = np.take_along_axis(R.real, order[:, None, :], axis=2)
    aL = np.linalg.solve(R, inp.dqL[..., None])[..., 0]
    aR = np.linalg.solve(R, inp.dqR[..., None])[..., 0]
    left = np.stack([aR[:, 0], aL[:, 1], aL[:, 2]], axis=1)
    right = np.stack([aR[:, 0], aR[:, 1], aL[:, 2]], axis=1)
    return np.stack([_mv(R, left), _mv(R, right)], axis=1)
