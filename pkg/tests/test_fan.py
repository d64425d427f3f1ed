import numpy as np
import pytest

from ductgrp import fan, riemann
from ductgrp.errors import NearVacuumFan, OutOfFan
from ductgrp.gas import GasModel

from conftest import fan_oracle_error, random_fan


@pytest.mark.parametrize("gamma, second", [(1.4, True), (1.4, False), (5.0 / 3.0, False),
                                           (3.0, False), (5.0 / 3.0, True), (3.0, True),
                                           (1.2, True), (2.0, True)])
def test_closed_forms_match_oracle(rng, gamma, second):
    for nozzle in (False, True):
        for _ in range(3):
            assert fan_oracle_error(rng, gamma, second, nozzle) <= 1e-7


def _setup(rng, gamma=1.4):
    q, dq, d2q, beta_R, g0, gp0 = random_fan(rng, gamma)
    return fan.FanSetup.create(q[None], dq[None], d2q[None], [beta_R], [g0], [gp0], GasModel(gamma))


def test_px_w_is_beta_derivative(rng):
    fs = fan.FanSolution(_setup(rng))
    b = np.linspace(fs.setup.beta_L[0] + 1e-3, fs.setup.beta_R[0] - 1e-3, 9)[None]
    h = 1e-6
    fd = (fs.dlam_w(b + h) - fs.dlam_w(b - h)) / (2 * h)
    np.testing.assert_allclose(fs.px_w(b), fd, rtol=1e-7, atol=1e-7 * np.abs(fd).max())


def test_head_values_reproduced(rng):
    fs = fan.FanSolution(_setup(rng))
    at_head = fs.dlam_w(fs.setup.beta_L[:, None])[0, 0]
    np.testing.assert_allclose(at_head, [fs.head[0][0], fs.head[1][0]], rtol=1e-13)


def test_invariants_constant_across_fan(rng):
    fs = fan.FanSolution(_setup(rng))
    b = np.linspace(fs.setup.beta_L[0], fs.setup.beta_R[0], 7)[None]
    Phi, _, _ = fs.invariants_along(b)
    np.testing.assert_allclose(Phi[0, :, 0], fs.S_L[0])
    np.testing.assert_allclose(Phi[0, :, 1], fs.psi_L[0])


def test_tail_state_matches_riemann():
    g = GasModel(1.4)
    qL, qR = np.array([1.0, 0.0, 1.0]), np.array([0.125, 0.0, 0.1])
    rf = riemann.solve(qL, qR, g)
    setup = fan.FanSetup.create(qL[None], np.zeros((1, 3)), None, [float(rf.left_tail)], gas=g)
    fs = fan.FanSolution(setup)
    np.testing.assert_allclose(fs.in_fan_state(setup.beta_R[:, None])[0, 0], rf.q_star_L,
                               rtol=1e-10)


def test_zero_data_planar_gives_zero():
    setup = fan.FanSetup.create(np.array([[1.0, 0.0, 1.0]]), np.zeros((1, 3)), np.zeros((1, 3)), [0.5])
    fs = fan.FanSolution(setup)
    b = np.linspace(setup.beta_L[0], 0.5, 5)[None]
    assert np.all(np.abs(fs.dlam_w(b)) < 1e-14)
    assert np.all(np.abs(fs.dlam2_w(b)) < 1e-14)


def test_out_of_fan_is_rejected(rng):
    fs = fan.FanSolution(_setup(rng))
    with pytest.raises(OutOfFan):
        fs.dlam_w(np.array([[fs.setup.beta_R[0] + 1.0]]))


def test_near_vacuum_tail():
    q = np.array([[1.0, 0.0, 1.0]])
    psi = 5 * np.sqrt(1.4)
    setup = fan.FanSetup.create(q, np.zeros((1, 3)), None, [psi])
    with pytest.raises(NearVacuumFan):
        fan.FanSolution(setup)
