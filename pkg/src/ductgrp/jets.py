"""Cauchy-Kowalewski jets and directional derivatives of smooth duct flow.

Given ``Q``, ``Q_x`` and ``Q_xx`` at a point where the solution is smooth,
the governing equations ``Q_t + J(Q) Q_x = H(x, Q)`` determine ``Q_t``,
``Q_tx`` and ``Q_tt``.  All routines are batched over leading axes and take
``g = A'/A`` and ``gp = (A'/A)'`` at the point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gas import (conserved_jacobians, conserved_second_variations, invariant_gradients,
                  invariant_second_variations, primitive_jacobian, source_from_dlogA)


def _mv(M, v):
    return np.einsum("...ij,...j->...i", M, v)


def dJ(q, a, b, gamma):
    """Directional derivative ``(dJ/dQ . a) b`` of the primitive coefficient matrix."""
    rho = q[..., 0]
    ra, ua, pa = a[..., 0], a[..., 1], a[..., 2]
    rb, ub, pb = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([ua * rb + ra * ub,
                     ua * ub - ra * pb / rho ** 2,
                     gamma * pa * ub + ua * pb], axis=-1)


def _h(q, d, gamma):
    """Derivative of ``(rho u, 0, gamma p u)`` in direction ``d``."""
    rho, u, p = q[..., 0], q[..., 1], q[..., 2]
    z = np.zeros_like(rho * d[..., 0])
    return np.stack([d[..., 0] * u + rho * d[..., 1], z,
                     gamma * (d[..., 2] * u + p * d[..., 1])], axis=-1)


@dataclass
class Jets:
    """Space-time derivatives at one point (arrays of shape ``(..., 3)``)."""

    q: np.ndarray
    qx: np.ndarray
    qxx: np.ndarray | None
    qt: np.ndarray
    qtx: np.ndarray | None
    qtt: np.ndarray | None


def ck_jets(q, qx, qxx, g, gp, gamma) -> Jets:
    """Time derivatives from spatial ones; ``qxx=None`` stops at first order."""
    q = np.asarray(q, dtype=float)
    qx = np.asarray(qx, dtype=float)
    g = np.asarray(g, dtype=float)
    gp = np.asarray(gp, dtype=float)
    J = primitive_jacobian(q, gamma)
    H = source_from_dlogA(q, g, gamma)
    qt = -_mv(J, qx) + H
    if qxx is None:
        return Jets(q, qx, None, qt, None, None)
    qxx = np.asarray(qxx, dtype=float)
    rho, u, p = q[..., 0], q[..., 1], q[..., 2]
    h0 = np.stack([rho * u, np.zeros_like(rho), gamma * p * u], axis=-1)
    Hx = -gp[..., None] * h0 - g[..., None] * _h(q, qx, gamma)
    qtx = -_mv(J, qxx) - dJ(q, qx, qx, gamma) + Hx
    Ht = -g[..., None] * _h(q, qt, gamma)
    qtt = -_mv(J, qtx) - dJ(q, qt, qx, gamma) + Ht
    return Jets(q, qx, qxx, qt, qtx, qtt)


def char_speed(q, family: int, gamma):
    """Characteristic speed ``u + family*c`` (family in {-1, 0, 1})."""
    c = np.sqrt(gamma * q[..., 2] / q[..., 0])
    return q[..., 1] + family * c


def char_speed_gradient(q, family: int, gamma):
    rho, p = q[..., 0], q[..., 2]
    c = np.sqrt(gamma * p / rho)
    f = float(family)
    return np.stack([-f * c / (2 * rho), np.ones_like(rho), f * c / (2 * p)], axis=-1)


@dataclass
class Directional:
    """First and second derivatives of ``Q`` along a characteristic direction."""

    lam: np.ndarray
    d1: np.ndarray          # D Q
    dlam: np.ndarray        # D lambda (zero for a prescribed constant speed)
    d2: np.ndarray | None   # D^2 Q


def along(jets: Jets, lam, dlam=None, family: int | None = None, gamma=None) -> Directional:
    """Derivatives of ``Q`` along ``dx/dt = lam``.

    If ``family`` is given the speed is the state-dependent characteristic
    speed and its own derivative is computed; otherwise ``dlam`` (the
    acceleration of the path) must be supplied.
    """
    lam = np.asarray(lam, dtype=float)
    l = lam[..., None]
    d1 = jets.qt + l * jets.qx
    if family is not None:
        dlam = np.einsum("...i,...i->...", char_speed_gradient(jets.q, family, gamma), d1)
    dlam = np.asarray(dlam, dtype=float)
    d2 = None
    if jets.qtt is not None:
        d2 = jets.qtt + 2 * l * jets.qtx + l * l * jets.qxx + dlam[..., None] * jets.qx
    return Directional(lam, d1, dlam, d2)


def invariant_derivs(q, dirv: Directional, gamma):
    """``D (S, psi, phi)`` and ``D^2 (S, psi, phi)`` along ``dirv``."""
    G = invariant_gradients(q, gamma)
    d1 = _mv(G, dirv.d1)
    d2 = None
    if dirv.d2 is not None:
        d2 = _mv(G, dirv.d2) + invariant_second_variations(q, dirv.d1, gamma)
    return d1, d2


def flux_derivs(q, dirv: Directional, sigma, gamma):
    """``D (F - sigma U)`` and ``D^2 (F - sigma U)`` along a path of speed ``sigma``.

    ``dirv.dlam`` is the path acceleration and enters the second derivative
    through ``-2 D(sigma) D U``; the term ``-D^2(sigma) U`` is left to the caller.
    """
    sigma = np.asarray(sigma, dtype=float)[..., None]
    dU, dF = conserved_jacobians(q, gamma)
    DU = _mv(dU, dirv.d1)
    d1 = _mv(dF, dirv.d1) - sigma * DU
    d2 = None
    if dirv.d2 is not None:
        hU, hF = conserved_second_variations(q, dirv.d1, gamma)
        d2 = (_mv(dF, dirv.d2) + hF - sigma * (_mv(dU, dirv.d2) + hU)
              - 2.0 * dirv.dlam[..., None] * DU)
    return d1, d2


def conserved_taylor(q, qt, qtt, gamma):
    """``U``, ``U_t``, ``U_tt`` from primitive time derivatives."""
    rho, u = q[..., 0], q[..., 1]
    rt, ut, pt = qt[..., 0], qt[..., 1], qt[..., 2]
    k = 1.0 / (gamma - 1.0)
    U = np.stack([rho, rho * u, q[..., 2] * k + 0.5 * rho * u * u], axis=-1)
    Ut = np.stack([rt, rt * u + rho * ut, pt * k + 0.5 * rt * u * u + rho * u * ut], axis=-1)
    if qtt is None:
        return U, Ut, None
    rtt, utt, ptt = qtt[..., 0], qtt[..., 1], qtt[..., 2]
    Utt = np.stack([rtt,
                    rtt * u + 2 * rt * ut + rho * utt,
                    ptt * k + 0.5 * rtt * u * u + 2 * rt * u * ut + rho * ut * ut
                    + rho * u * utt], axis=-1)
    return U, Ut, Utt
