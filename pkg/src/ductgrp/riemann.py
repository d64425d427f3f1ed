"""Exact solver for the planar Riemann problem of a gamma-law gas.

Batched over any number of independent problems; the star pressure is found
by Newton iteration from the two-rarefaction estimate with a bisection
safeguard for the rare entries that do not converge.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import NoConvergence, VacuumFormation
from .gas import GasModel, PrimitiveState, _arr, _gamma, check_physical, invariants_to_prim

DEGENERATE_TOL = 1e-12
SONIC_MARGIN = 1e-10


class WaveKind(IntEnum):
    RAREFACTION = 0
    SHOCK = 1


class Region(IntEnum):
    """Location of the t-axis inside the wave pattern."""

    LEFT = 0
    STAR_LEFT = 1
    STAR_RIGHT = 2
    RIGHT = 3
    SONIC_LEFT = 4   # inside the left-going rarefaction
    SONIC_RIGHT = 5  # inside the right-going rarefaction


@dataclass(frozen=True)
class Wave:
    """Human-readable description of one nonlinear wave of a scalar fan."""

    family: str
    kind: WaveKind
    head: float
    tail: float
    degenerate: bool

    @property
    def speed(self) -> float:
        return self.head


@dataclass(frozen=True)
class RiemannFan:
    """Self-similar solution of one or many Riemann problems.

    All per-problem fields share the batch shape of the inputs.  For a
    rarefaction ``*_head`` and ``*_tail`` are the edge speeds; for a shock
    both equal the shock speed.
    """

    qL: np.ndarray
    qR: np.ndarray
    p_star: np.ndarray
    u_star: np.ndarray
    rho_star_L: np.ndarray
    rho_star_R: np.ndarray
    left_kind: np.ndarray
    right_kind: np.ndarray
    left_degenerate: np.ndarray
    right_degenerate: np.ndarray
    left_head: np.ndarray
    left_tail: np.ndarray
    right_head: np.ndarray
    right_tail: np.ndarray
    gamma: float
    iterations: int = 0

    @property
    def q_star_L(self) -> np.ndarray:
        return np.stack([self.rho_star_L, self.u_star, self.p_star], axis=-1)

    @property
    def q_star_R(self) -> np.ndarray:
        return np.stack([self.rho_star_R, self.u_star, self.p_star], axis=-1)

    @property
    def sigma_L(self) -> np.ndarray:
        return np.where(self.left_kind == WaveKind.SHOCK, self.left_head, np.nan)

    @property
    def sigma_R(self) -> np.ndarray:
        return np.where(self.right_kind == WaveKind.SHOCK, self.right_head, np.nan)

    def waves(self, index=()) -> tuple:
        """Left wave, contact speed and right wave for one problem of the batch."""
        def w(fam, kind, head, tail, deg):
            return Wave(fam, WaveKind(int(kind[index])), float(head[index]),
                        float(tail[index]), bool(deg[index]))
        return (w("left", self.left_kind, self.left_head, self.left_tail, self.left_degenerate),
                float(self.u_star[index]),
                w("right", self.right_kind, self.right_head, self.right_tail,
                  self.right_degenerate))

    def take(self, mask) -> "RiemannFan":
        """Sub-batch selected by a boolean mask or index array."""
        kw = {k: getattr(self, k)[mask] for k in (
            "qL", "qR", "p_star", "u_star", "rho_star_L", "rho_star_R", "left_kind",
            "right_kind", "left_degenerate", "right_degenerate", "left_head",
            "left_tail", "right_head", "right_tail")}
        return RiemannFan(gamma=self.gamma, iterations=self.iterations, **kw)


def _pressure_function(p, rho, pk, ck, gam):
    """Toro's f_K(p) and its derivative, vectorised."""
    A = 2.0 / ((gam + 1.0) * rho)
    B = (gam - 1.0) / (gam + 1.0) * pk
    shock = p > pk
    ps = np.where(shock, p, pk)  # keeps the unused branch finite
    root = np.sqrt(A / (ps + B))
    f_s = (p - pk) * root
    df_s = root * (1.0 - 0.5 * (p - pk) / (ps + B))
    pr = np.where(shock, pk, p)
    z = (gam - 1.0) / (2.0 * gam)
    ratio = (pr / pk) ** z
    f_r = 2.0 * ck / (gam - 1.0) * (ratio - 1.0)
    df_r = 1.0 / (rho * ck) * (pr / pk) ** (-(gam + 1.0) / (2.0 * gam))
    return np.where(shock, f_s, f_r), np.where(shock, df_s, df_r)


def solve(qL, qR, g: GasModel, tol: float = 1e-12, max_iter: int = 60) -> RiemannFan:
    """Solve the Riemann problem(s) with left data ``qL`` and right data ``qR``.

    Raises
    ------
    VacuumFormation
        If ``psi_L <= phi_R`` for any entry.
    NoConvergence
        If neither Newton nor bisection reaches the tolerance.
    """
    gam = _gamma(g)
    qL = _arr(qL)
    qR = _arr(qR)
    qL, qR = np.broadcast_arrays(qL, qR)
    shape = qL.shape[:-1]
    L = qL.reshape(-1, 3)
    R = qR.reshape(-1, 3)
    check_physical(L, "left Riemann state")
    check_physical(R, "right Riemann state")
    rL, uL, pL = L.T
    rR, uR, pR = R.T
    cL = np.sqrt(gam * pL / rL)
    cR = np.sqrt(gam * pR / rR)
    du = uR - uL
    k = 2.0 / (gam - 1.0)
    if np.any(k * (cL + cR) <= du):
        raise VacuumFormation("the data generate a vacuum (psi_L <= phi_R)")

    z = (gam - 1.0) / (2.0 * gam)
    p = ((cL + cR - 0.5 * (gam - 1.0) * du) / (cL / pL ** z + cR / pR ** z)) ** (1.0 / z)
    active = np.ones(p.shape, dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        idx = np.nonzero(active)[0]
        pa = p[idx]
        fl, dfl = _pressure_function(pa, rL[idx], pL[idx], cL[idx], gam)
        fr, dfr = _pressure_function(pa, rR[idx], pR[idx], cR[idx], gam)
        pn = pa - (fl + fr + du[idx]) / (dfl + dfr)
        pn = np.where(pn > 0.0, pn, 0.1 * pa)
        done = np.abs(pn - pa) <= 0.25 * tol * (pn + pa)
        p[idx] = pn
        active[idx[done]] = False
        if not active.any():
            break
    if active.any():
        p = _bisect(p, active, L, R, cL, cR, du, gam, tol)

    fl, _ = _pressure_function(p, rL, pL, cL, gam)
    fr, _ = _pressure_function(p, rR, pR, cR, gam)
    u = 0.5 * (uL + uR) + 0.5 * (fr - fl)

    mu = (gam - 1.0) / (gam + 1.0)
    degL = np.abs(p - pL) <= DEGENERATE_TOL * pL
    degR = np.abs(p - pR) <= DEGENERATE_TOL * pR
    shockL = (p > pL) & ~degL
    shockR = (p > pR) & ~degR
    xl, xr = p / pL, p / pR
    rsL = np.where(shockL, rL * (xl + mu) / (mu * xl + 1.0), rL * xl ** (1.0 / gam))
    rsR = np.where(shockR, rR * (xr + mu) / (mu * xr + 1.0), rR * xr ** (1.0 / gam))
    csL = np.sqrt(gam * p / rsL)
    csR = np.sqrt(gam * p / rsR)
    a1 = (gam + 1.0) / (2.0 * gam)
    a2 = (gam - 1.0) / (2.0 * gam)
    sL = uL - cL * np.sqrt(a1 * xl + a2)
    sR = uR + cR * np.sqrt(a1 * xr + a2)
    lh = np.where(shockL, sL, uL - cL)
    lt = np.where(shockL, sL, u - csL)
    rh = np.where(shockR, sR, uR + cR)
    rt = np.where(shockR, sR, u + csR)

    def rs(a):
        return a.reshape(shape)

    return RiemannFan(
        qL=qL.copy(), qR=qR.copy(), p_star=rs(p), u_star=rs(u), rho_star_L=rs(rsL),
        rho_star_R=rs(rsR),
        left_kind=rs(np.where(shockL, int(WaveKind.SHOCK), int(WaveKind.RAREFACTION))),
        right_kind=rs(np.where(shockR, int(WaveKind.SHOCK), int(WaveKind.RAREFACTION))),
        left_degenerate=rs(degL), right_degenerate=rs(degR),
        left_head=rs(lh), left_tail=rs(lt), right_head=rs(rh), right_tail=rs(rt),
        gamma=gam, iterations=it)


def _bisect(p, active, L, R, cL, cR, du, gam, tol):
    idx = np.nonzero(active)[0]
    rL, pL, rR, pR = L[idx, 0], L[idx, 2], R[idx, 0], R[idx, 2]
    cl, cr, d = cL[idx], cR[idx], du[idx]

    def f(x):
        return (_pressure_function(x, rL, pL, cl, gam)[0]
                + _pressure_function(x, rR, pR, cr, gam)[0] + d)

    lo = np.full(idx.shape, 1e-300)
    hi = np.maximum(pL, pR)
    for _ in range(200):
        grow = f(hi) < 0.0
        if not grow.any():
            break
        hi = np.where(grow, 2.0 * hi, hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        pos = f(mid) > 0.0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
        if np.all(hi - lo <= tol * hi):
            break
    else:
        raise NoConvergence("star pressure bisection did not converge")
    p = p.copy()
    p[idx] = 0.5 * (lo + hi)
    return p


def sample(fan: RiemannFan, theta) -> np.ndarray:
    """Primitive state on the ray ``x/t = theta`` (broadcast against the batch)."""
    gam = fan.gamma
    theta = np.asarray(theta, dtype=float)
    qL = np.broadcast_to(fan.qL, np.broadcast_shapes(fan.qL.shape, theta.shape + (3,)))
    qR = np.broadcast_to(fan.qR, qL.shape)
    out = np.empty(qL.shape)
    th = np.broadcast_to(theta, qL.shape[:-1])
    bc = [np.broadcast_to(a, th.shape) for a in (
        fan.u_star, fan.p_star, fan.rho_star_L, fan.rho_star_R, fan.left_head,
        fan.left_tail, fan.right_head, fan.right_tail)]
    us, ps, rsl, rsr, lh, lt, rh, rt = bc

    left = th <= lh
    fanL = (th > lh) & (th < lt)
    starL = (th >= lt) & (th <= us)
    starR = (th > us) & (th <= rt)
    fanR = (th > rt) & (th < rh)
    right = th >= rh
    # contact exactly on the ray belongs to the left star state
    out[left] = qL[left]
    out[right] = qR[right]
    out[starL] = np.stack([rsl[starL], us[starL], ps[starL]], axis=-1)
    out[starR] = np.stack([rsr[starR], us[starR], ps[starR]], axis=-1)
    kap = (gam - 1.0) / (gam + 1.0)
    k = 2.0 / (gam - 1.0)
    if fanL.any():
        q = qL[fanL]
        S = q[:, 2] * q[:, 0] ** (-gam)
        c0 = np.sqrt(gam * q[:, 2] / q[:, 0])
        psi = q[:, 1] + k * c0
        b = th[fanL]
        c = kap * (psi - b)
        out[fanL] = invariants_to_prim(S, psi, psi - 2 * k * c, gam)
    if fanR.any():
        q = qR[fanR]
        S = q[:, 2] * q[:, 0] ** (-gam)
        c0 = np.sqrt(gam * q[:, 2] / q[:, 0])
        phi = q[:, 1] - k * c0
        b = th[fanR]
        c = kap * (b - phi)
        out[fanR] = invariants_to_prim(S, phi + 2 * k * c, phi, gam)
    return out


def classify_t_axis(fan: RiemannFan, margin: float = SONIC_MARGIN) -> np.ndarray:
    """Integer :class:`Region` codes telling where the t-axis lies."""
    lh, lt, u, rt, rh = fan.left_head, fan.left_tail, fan.u_star, fan.right_tail, fan.right_head
    rare_L = (fan.left_kind == WaveKind.RAREFACTION) & ~fan.left_degenerate
    rare_R = (fan.right_kind == WaveKind.RAREFACTION) & ~fan.right_degenerate
    sonic_L = rare_L & (lh < margin) & (lt > -margin) & (lt - lh > 2 * margin)
    sonic_R = rare_R & (rt < margin) & (rh > -margin) & (rh - rt > 2 * margin)
    reg = np.where(lh >= 0.0, Region.LEFT,
                   np.where(lt >= 0.0, Region.STAR_LEFT,
                            np.where(u >= 0.0, Region.STAR_LEFT,
                                     np.where(rt >= 0.0, Region.STAR_RIGHT,
                                              np.where(rh > 0.0, Region.STAR_RIGHT,
                                                       Region.RIGHT)))))
    reg = np.where(sonic_L, Region.SONIC_LEFT, reg)
    reg = np.where(sonic_R, Region.SONIC_RIGHT, reg)
    return reg.astype(int)


def as_state(q) -> PrimitiveState:
    return PrimitiveState.from_array(q)
