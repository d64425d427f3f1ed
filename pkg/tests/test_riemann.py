import numpy as np
import pytest

from ductgrp import riemann
from ductgrp.gas import GasModel, eigenvalues, prim_to_cons, planar_flux
from ductgrp.riemann import Region, WaveKind

from conftest import random_states


@pytest.mark.parametrize("qL, qR, p_star, u_star", [
    ((1.0, 0.0, 1.0), (0.125, 0.0, 0.1), 0.30313, 0.92745),
    ((1.0, -2.0, 0.4), (1.0, 2.0, 0.4), 0.00189, 0.0),
    ((1.0, 0.0, 1000.0), (1.0, 0.0, 0.01), 460.894, 19.5975),
    ((5.99924, 19.5975, 460.894), (5.99242, -6.19633, 46.0950), 1691.64, 8.68975),
])
def test_star_states_textbook(qL, qR, p_star, u_star, air):
    fan = riemann.solve(np.array(qL), np.array(qR), air)
    assert float(fan.p_star) == pytest.approx(p_star, rel=2e-4, abs=2e-5)
    assert float(fan.u_star) == pytest.approx(u_star, rel=2e-4, abs=2e-5)


def test_sod_pattern(air):
    fan = riemann.solve(np.array([1.0, 0, 1.0]), np.array([0.125, 0, 0.1]), air)
    assert fan.left_kind == WaveKind.RAREFACTION and fan.right_kind == WaveKind.SHOCK
    assert riemann.classify_t_axis(fan) == Region.STAR_LEFT
    np.testing.assert_allclose(riemann.sample(fan, 0.0), [0.42632, 0.92745, 0.30313], rtol=1e-4)


def test_sonic_classification():
    from ductgrp import cases
    inp = cases.sonic_case().grp_input()
    fan = riemann.solve(inp.qL, inp.qR, inp.gas)
    assert riemann.classify_t_axis(fan)[0] == Region.SONIC_LEFT


def test_symmetric_expansion_center(air):
    fan = riemann.solve(np.array([1.0, -0.1, 1.0]), np.array([1.0, 0.1, 1.0]), air)
    assert riemann.classify_t_axis(fan) == Region.STAR_LEFT
    assert abs(float(fan.u_star)) < 1e-14


def test_star_pressure_velocity_batch(rng, air):
    qL = random_states(rng, 1000)
    qR = random_states(rng, 1000)
    fan = riemann.solve(qL, qR, air)
    # both sides evaluate to the same star pressure and velocity
    from ductgrp.riemann import _pressure_function
    cL = np.sqrt(1.4 * qL[:, 2] / qL[:, 0])
    cR = np.sqrt(1.4 * qR[:, 2] / qR[:, 0])
    fL, _ = _pressure_function(fan.p_star, qL[:, 0], qL[:, 2], cL, 1.4)
    fR, _ = _pressure_function(fan.p_star, qR[:, 0], qR[:, 2], cR, 1.4)
    assert np.max(np.abs(qL[:, 1] - fL - fan.u_star)) <= 1e-10 * np.max(1 + np.abs(fan.u_star))
    assert np.max(np.abs(qR[:, 1] + fR - fan.u_star)) <= 1e-10 * np.max(1 + np.abs(fan.u_star))


def test_mirror_symmetry(rng, air):
    qL = random_states(rng, 300)
    qR = random_states(rng, 300)
    m = np.array([1.0, -1.0, 1.0])
    a = riemann.solve(qL, qR, air)
    b = riemann.solve(qR * m, qL * m, air)
    np.testing.assert_allclose(b.p_star, a.p_star, rtol=1e-12)
    np.testing.assert_allclose(b.u_star, -a.u_star, atol=1e-12)
    theta = np.linspace(-3, 3, 13)
    for th in theta:
        np.testing.assert_allclose(riemann.sample(b, -th) * m, riemann.sample(a, th),
                                   rtol=1e-11, atol=1e-12)


def test_sampling_inside_left_fan(air):
    qL = np.array([1.0, 0.0, 1.0])
    fan = riemann.solve(qL, np.array([0.125, 0.0, 0.1]), air)
    th = np.linspace(float(fan.left_head) + 1e-6, float(fan.left_tail) - 1e-6, 50)
    q = riemann.sample(fan, th)
    np.testing.assert_allclose(eigenvalues(q, air)[:, 0], th, atol=1e-10)
    S = q[:, 2] / q[:, 0] ** 1.4
    np.testing.assert_allclose(S, 1.0, rtol=1e-10)


def test_shock_rankine_hugoniot(rng, air):
    qL = random_states(rng, 200)
    qR = random_states(rng, 200)
    fan = riemann.solve(qL, qR, air)
    sh = fan.right_kind == WaveKind.SHOCK
    s = fan.right_head[sh]
    Us = prim_to_cons(fan.q_star_R[sh], air)
    UR = prim_to_cons(qR[sh], air)
    res = planar_flux(UR, air) - planar_flux(Us, air) - s[:, None] * (UR - Us)
    scale = np.abs(planar_flux(UR, air)).max(axis=1, keepdims=True) + np.abs(s[:, None] * UR)
    assert np.max(np.abs(res) / scale) <= 1e-10


def test_waves_summary(air):
    fan = riemann.solve(np.array([1.0, 0, 1.0]), np.array([0.125, 0, 0.1]), air)
    left, contact, right = fan.waves()
    assert left.kind == WaveKind.RAREFACTION and left.head < left.tail
    assert right.kind == WaveKind.SHOCK
    assert contact == pytest.approx(0.92745, rel=1e-4)
