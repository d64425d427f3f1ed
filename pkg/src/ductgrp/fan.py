"""Closed-form derivatives inside a centred left-going rarefaction fan.

At the singular point the fan is parameterised by the slope ``beta`` of its
characteristics.  Along each of them the directional derivatives of the
invariants ``(S, psi)`` obey linear ODEs in ``beta`` whose coefficients are
powers of ``s = psi_L - beta`` (because ``c = kappa s`` inside the fan).
They are integrated exactly with :mod:`ductgrp.powerlog`, which covers every
gamma including the logarithmic branches ``gamma = 3`` and ``gamma = 5/3``.

The right-going fan is obtained by the mirror map in :mod:`ductgrp.grp`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearVacuumFan, OutOfFan
from .gas import GasModel, _arr, _gamma, invariants_to_prim
from .jets import along, ck_jets, invariant_derivs
from .powerlog import PowerLog, solve_linear_ode

FAN_TOL = 1e-10
VACUUM_GAP = 1e-12


@dataclass(frozen=True)
class FanSetup:
    """Data at the head of one or many left-going fans.

    ``qL``, ``dqL`` and ``d2qL`` have shape ``(..., 3)``; ``beta_L``,
    ``beta_R``, ``g0`` (``A'/A`` at the interface) and ``gp0`` (its
    derivative) have the batch shape.  ``d2qL`` may be ``None`` when only
    first-order quantities are needed.
    """

    qL: np.ndarray
    dqL: np.ndarray
    d2qL: np.ndarray | None
    beta_L: np.ndarray
    beta_R: np.ndarray
    g0: np.ndarray
    gp0: np.ndarray
    gas: GasModel

    @classmethod
    def create(cls, qL, dqL, d2qL, beta_R, g0=0.0, gp0=0.0, gas=GasModel(), beta_L=None):
        gam = _gamma(gas)
        qL = _arr(qL)
        shape = qL.shape[:-1]
        c = np.sqrt(gam * qL[..., 2] / qL[..., 0])
        bl = qL[..., 1] - c if beta_L is None else np.asarray(beta_L, dtype=float)

        def b(x):
            return np.broadcast_to(np.asarray(x, dtype=float), shape).copy()

        d2 = None if d2qL is None else np.broadcast_to(np.asarray(d2qL, float), qL.shape).copy()
        return cls(qL, np.broadcast_to(np.asarray(dqL, float), qL.shape).copy(), d2, b(bl),
                   b(beta_R), b(g0), b(gp0), gas if isinstance(gas, GasModel) else GasModel(gam))


def head_directional_derivs(setup: FanSetup):
    """``(D S, D psi, D^2 S, D^2 psi)`` along the head characteristic.

    The second-order pair is ``None`` when ``setup.d2qL`` is missing.
    """
    gam = setup.gas.gamma
    jets = ck_jets(setup.qL, setup.dqL, setup.d2qL, setup.g0, setup.gp0, gam)
    d = along(jets, setup.beta_L, family=-1, gamma=gam)
    d1, d2 = invariant_derivs(setup.qL, d, gam)
    if d2 is None:
        return d1[..., 0], d1[..., 1], None, None
    return d1[..., 0], d1[..., 1], d2[..., 0], d2[..., 1]


class FanSolution:
    """All in-fan characteristic derivatives for a batch of fans.

    Every attribute in :attr:`series` is a :class:`PowerLog` in
    ``s = psi_L - beta``; the public evaluators take ``beta``.
    """

    def __init__(self, setup: FanSetup, second_order: bool | None = None):
        gam = setup.gas.gamma
        self.setup = setup
        self.gamma = gam
        if second_order is None:
            second_order = setup.d2qL is not None
        self.second_order = second_order
        qL = setup.qL
        rho, u, p = qL[..., 0], qL[..., 1], qL[..., 2]
        c = np.sqrt(gam * p / rho)
        self.S_L = p * rho ** (-gam)
        self.psi_L = u + 2.0 * c / (gam - 1.0)
        kap = (gam - 1.0) / (gam + 1.0)
        self.kappa = kap
        self.s_L = self.psi_L - setup.beta_L
        self.s_R = self.psi_L - setup.beta_R
        if np.any(self.s_R <= VACUUM_GAP):
            raise NearVacuumFan("fan tail reaches psi_L - beta <= 1e-12")

        a0, b0, X0, Y0 = head_directional_derivs(setup)
        self.head = (a0, b0, X0, Y0)
        g, gp = setup.g0, setup.gp0
        G = gam * (gam - 1.0) * self.S_L
        shape = self.S_L.shape
        one = np.ones(shape)
        s = PowerLog.monomial(1.0, one)
        cs = s * kap
        us = PowerLog.constant(self.psi_L) - s * (1.0 - kap)
        beta = PowerLog.constant(self.psi_L) - s

        a = solve_linear_ode(1.0 / kap, PowerLog.zero(shape), self.s_L, a0)
        fb = a * (1.0 / (2.0 * G)) + PowerLog.constant(0.5 * g * self.psi_L) - s * (0.5 * g * (1.0 - kap))
        b = solve_linear_ode(0.5 / kap, fb, self.s_L, b0)
        dphi = -(cs * a) * (1.0 / G) + (cs * us) * g
        du = (b + dphi) * 0.5
        dc = (b - dphi) * (0.25 * (gam - 1.0))
        dlam = du - dc
        dlam_s = dlam.deriv()
        self.series = dict(S=a, psi=b, phi=dphi, u=du, c=dc, lam=dlam, dbeta_lam=-dlam_s)
        if not second_order:
            return

        ik = 1.0 / kap
        fX = (dc * a).shift(-2.0) * (-2.0 * ik * ik) - (dlam_s * a).shift(-1.0) * ik
        X = solve_linear_ode(2.0 * ik, fX, self.s_L, X0)
        dgu = (beta * us) * gp + du * g
        bracket = a * (-0.5 / G) - b.shift(-1.0) * (0.5 * ik) - us * (0.5 * g)
        fY = (X * (1.0 / G) - (a * a) * (1.0 / (G * self.S_L))
              - (dc * b).shift(-2.0) * (ik * ik) + dgu + dlam_s * bracket)
        Y = solve_linear_ode(ik, fY, self.s_L, Y0)
        # second derivative of phi from differentiating its first-order relation
        k1 = 1.0 / (gam * (gam - 1.0))
        d2phi = (-(cs * X) * (k1 / self.S_L)
                 - (dc * a) * (k1 / self.S_L) + (cs * a * a) * (k1 / self.S_L ** 2)
                 + (beta * cs * us) * gp + (dc * us + cs * du) * g)
        self.series.update(S2=X, psi2=Y, phi2=d2phi)

    # -- helpers ---------------------------------------------------------
    def s_of(self, beta, check: bool = True) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        extra = beta.ndim - self.S_L.ndim
        ex = (...,) + (None,) * extra if extra > 0 else ...
        if check:
            bl, br = self.setup.beta_L[ex], self.setup.beta_R[ex]
            tol = FAN_TOL * (1.0 + np.abs(bl) + np.abs(br))
            if np.any((beta < bl - tol) | (beta > br + tol)):
                raise OutOfFan("beta outside [beta_L, beta_R]")
        return self.psi_L[ex] - beta

    def _eval(self, name, beta, check=True):
        return self.series[name](self.s_of(beta, check))

    # -- public evaluators ----------------------------------------------
    def dlam_w(self, beta, check=True):
        """``(D S, D psi)`` stacked on the last axis."""
        return np.stack([self._eval("S", beta, check), self._eval("psi", beta, check)], axis=-1)

    def dlam2_w(self, beta, check=True):
        if not self.second_order:
            raise ValueError("second-order data were not supplied")
        return np.stack([self._eval("S2", beta, check), self._eval("psi2", beta, check)], axis=-1)

    def dlam_phi(self, beta, check=True):
        return self._eval("phi", beta, check)

    def dlam2_phi(self, beta, check=True):
        return self._eval("phi2", beta, check)

    def dlam_lambda(self, beta, check=True):
        return self._eval("lam", beta, check)

    def ddbeta_dlam_lambda(self, beta, check=True):
        return self._eval("dbeta_lam", beta, check)

    def px_w(self, beta, check=True):
        """Spatial gradients ``(S_x, psi_x)`` on the ray ``beta`` (d/dbeta of ``dlam_w``)."""
        s = self.s_of(beta, check)
        return np.stack([-self.series["S"].deriv()(s), -self.series["psi"].deriv()(s)], axis=-1)

    def in_fan_state(self, beta, check=True) -> np.ndarray:
        s = self.s_of(beta, check)
        gam = self.gamma
        ex = (...,) + (None,) * (s.ndim - self.S_L.ndim)
        c = self.kappa * s
        psi = np.broadcast_to(self.psi_L[ex], s.shape)
        return invariants_to_prim(np.broadcast_to(self.S_L[ex], s.shape), psi,
                                  psi - 4.0 * c / (gam - 1.0), gam)

    def invariants_along(self, beta, check=True):
        """``Phi = (S, psi, phi)`` together with its first and second derivatives."""
        s = self.s_of(beta, check)
        gam = self.gamma
        ex = (...,) + (None,) * (s.ndim - self.S_L.ndim)
        c = self.kappa * s
        psi = np.broadcast_to(self.psi_L[ex], s.shape)
        Phi = np.stack([np.broadcast_to(self.S_L[ex], s.shape), psi,
                        psi - 4.0 * c / (gam - 1.0)], axis=-1)
        d1 = np.stack([self.series[k](s) for k in ("S", "psi", "phi")], axis=-1)
        d2 = None
        if self.second_order:
            d2 = np.stack([self.series[k](s) for k in ("S2", "psi2", "phi2")], axis=-1)
        return Phi, d1, d2


def build(setup: FanSetup, second_order: bool | None = None) -> FanSolution:
    return FanSolution(setup, second_order)
