import numpy as np
import pytest

from ductgrp import oracles


def test_fd_time_derivs_polynomial():
    t = np.linspace(0.0, 0.1, 40)
    v = 1.0 + 2.0 * t - 3.0 * t ** 2 + 0.5 * t ** 3
    est = oracles.fd_time_derivs(t, v)
    assert float(est.dt) == pytest.approx(2.0, rel=1e-8)
    assert float(est.dt2) == pytest.approx(-6.0, rel=1e-7)


def test_fd_time_derivs_smooth_function():
    t = np.linspace(0.0, 0.2, 60)
    est = oracles.fd_time_derivs(t, np.stack([np.sin(t), np.exp(t)], axis=-1), degree=5)
    np.testing.assert_allclose(est.dt, [1.0, 1.0], rtol=1e-7)
    np.testing.assert_allclose(est.dt2, [0.0, 1.0], atol=1e-5)


def test_oracle_constant_fan_has_zero_derivatives():
    q = np.array([1.0, 0.0, 1.0])
    c = np.sqrt(1.4)
    betas = np.linspace(-c, -c + 0.5, 9)
    out = oracles.rk_lq_oracle(q, [0.0, 0.0, 0.0, 0.0], betas)
    assert np.abs(out.dlam_w).max() < 1e-13 and np.abs(out.dlam2_w).max() < 1e-13


def test_oracle_degenerate_grid():
    q = np.array([1.0, 0.0, 1.0])
    out = oracles.rk_lq_oracle(q, [1.0, 2.0], np.full(3, -1.0))
    np.testing.assert_allclose(out.dlam_w, [[1.0, 2.0]] * 3)
    assert out.dlam2_w is None


def test_oracle_independent_of_fan_module():
    import ast
    import inspect
    tree = ast.parse(inspect.getsource(oracles))
    imported = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom) and n.module}
    assert "fan" not in imported and "powerlog" not in imported
