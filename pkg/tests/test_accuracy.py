import numpy as np
import pytest

from ductgrp import accuracy, cases
from ductgrp.cli import load_reference


def test_convergence_orders():
    t = np.array([1.0, 0.5, 0.25])
    o = accuracy.convergence_orders(t, 3.0 * t ** 2)
    assert np.isnan(o[0])
    np.testing.assert_allclose(o[1:], 2.0)


def test_exact_cell_averages():
    edges = np.linspace(0, 1, 5)
    avg = accuracy.exact_cell_averages(lambda x, t: np.stack([x * 0 + t, x], -1), edges, 2.0)
    np.testing.assert_allclose(avg[:, 0], 2.0)
    np.testing.assert_allclose(avg[:, 1], [0.125, 0.375, 0.625, 0.875])


@pytest.mark.parametrize("solver, expected", [
    ("lgrp1", (2.46, 2.20, 2.09)),
    ("qgrp1", (3.36, 3.13, 2.97)),
])
def test_acoustic_table(solver, expected):
    case = cases.acoustic_case()
    table = accuracy.solver_errors(case, load_reference(case, 20000, compute=False), solver)
    assert np.all(np.abs(table.orders[1:] - np.array(expected)) <= 0.35)
    assert table.newton_iterations == []
    rows = list(table.rows())
    assert len(rows) == 4 and rows[0][0] == pytest.approx(0.1)


def test_sonic_uses_invariant_norm():
    case = cases.sonic_case()
    table = accuracy.solver_errors(case, load_reference(case, 20000, compute=False), "qgrp_inf")
    assert table.norm == "Phi"
    assert max(table.newton_iterations) <= 3


def test_smooth_convergence_small():
    conv = accuracy.smooth_convergence(2, (32, 64))
    assert conv.l1[1] < conv.l1[0]
    assert conv.l1_orders[1] > 1.7
