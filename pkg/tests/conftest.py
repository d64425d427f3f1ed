import numpy as np
import pytest

from ductgrp.gas import GasModel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def air():
    return GasModel(1.4)


def random_states(rng, n, rho=(0.2, 3.0), u=(-2.0, 2.0), p=(0.2, 3.0)):
    return np.c_[rng.uniform(*rho, n), rng.uniform(*u, n), rng.uniform(*p, n)]


def random_fan(rng, gamma, nozzle=True):
    """One left-going fan with random head data; returns ``(qL, dq, d2q, beta_R, g0, gp0)``."""
    q = np.array([rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0)])
    c = np.sqrt(gamma * q[2] / q[0])
    beta_L = q[1] - c
    psi = q[1] + 2 * c / (gamma - 1)
    beta_R = beta_L + rng.uniform(0.1, 0.8) * (psi - beta_L)
    g0, gp0 = (rng.normal(), rng.normal()) if nozzle else (0.0, 0.0)
    return q, rng.normal(size=3), rng.normal(size=3), beta_R, g0, gp0


def fan_oracle_error(rng, gamma, second, nozzle=True, n_beta=33):
    """Max relative deviation of the closed forms from the RK oracle for one random fan."""
    from ductgrp import fan, oracles
    q, dq, d2q, beta_R, g0, gp0 = random_fan(rng, gamma, nozzle)
    setup = fan.FanSetup.create(q[None], dq[None], d2q[None] if second else None, [beta_R],
                                [g0], [gp0], GasModel(gamma))
    fs = fan.FanSolution(setup)
    betas = np.linspace(setup.beta_L[0], beta_R, n_beta)
    head = [h[0] for h in fs.head if h is not None]
    orc = oracles.rk_lq_oracle(q, head, betas, g0, gp0, gamma)

    def rel(a, b):
        return float(np.max(np.abs(a - b) / np.maximum(np.abs(b).max(axis=0), 1e-300)))

    err = rel(fs.dlam_w(betas[None])[0], orc.dlam_w)
    if second:
        err = max(err, rel(fs.dlam2_w(betas[None])[0], orc.dlam2_w))
    return err


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
