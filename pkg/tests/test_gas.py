import numpy as np
import pytest

from ductgrp import gas
from ductgrp.errors import DegenerateState, NonPhysicalState
from ductgrp.gas import DuctGeometry, GasModel, PrimitiveState

from conftest import random_states


def test_round_trip(rng, air):
    q = random_states(rng, 10_000)
    back = gas.cons_to_prim(gas.prim_to_cons(q, air), air)
    np.testing.assert_allclose(back, q, rtol=1e-12, atol=1e-13)


def test_sod_left_conserved(air):
    U = gas.prim_to_cons(np.array([1.0, 0.0, 1.0]), air)
    np.testing.assert_allclose(U, [1.0, 0.0, 2.5])


def test_nonphysical_rejected(air):
    with pytest.raises(NonPhysicalState):
        gas.cons_to_prim(np.array([1.0, 0.0, -1.0]), air)


@pytest.mark.parametrize("gamma", [1.4, 5.0 / 3.0, 3.0])
def test_invariants_inverse(rng, gamma):
    g = GasModel(gamma)
    q = random_states(rng, 500)
    S, psi, phi = gas.riemann_invariants(q, g)
    np.testing.assert_allclose(gas.invariants_to_prim(S, psi, phi, g), q, rtol=1e-12)


def test_invariants_example(air):
    c = np.sqrt(1.4)
    q = gas.invariants_to_prim(1.0, 5 * c, -5 * c, air)
    np.testing.assert_allclose(q, [1.0, 0.0, 1.0], atol=1e-14)


def test_vacuum_invariants(air):
    with pytest.raises(DegenerateState):
        gas.invariants_to_prim(1.0, 1.0, 1.0, air)


def test_eigenvalues_of_jacobian(rng, air):
    q = random_states(rng, 200)
    lam = np.sort(np.linalg.eigvals(gas.primitive_jacobian(q, air)).real, axis=1)
    np.testing.assert_allclose(lam, gas.eigenvalues(q, air), atol=1e-12)


def test_planar_source_vanishes(rng, air):
    q = random_states(rng, 50)
    H = gas.source_term(np.linspace(0, 1, 50), q, DuctGeometry.planar(), air)
    assert np.all(H == 0.0)


def test_flux_sod(air):
    U = gas.prim_to_cons(np.array([1.0, 0.5, 1.0]), air)
    np.testing.assert_allclose(gas.planar_flux(U, air), [0.5, 1.25, (2.5 + 0.125 + 1.0) * 0.5])


def test_gamma_branches():
    assert GasModel(3.0).is_gamma3 and not GasModel(1.4).is_gamma3
    assert GasModel(5.0 / 3.0).is_gamma53


def test_primitive_state_array():
    s = PrimitiveState(1.0, 2.0, 3.0)
    np.testing.assert_array_equal(np.asarray(s), [1.0, 2.0, 3.0])


def test_nozzle_geometry_derivatives():
    geo = DuctGeometry.laval_nozzle()
    x = np.linspace(0.01, 0.99, 37)
    h = 1e-6
    fd = (np.log(geo.area(x + h)) - np.log(geo.area(x - h))) / (2 * h)
    np.testing.assert_allclose(geo.dlogA(x), fd, atol=1e-6)
    fd2 = (geo.dlogA(x + h) - geo.dlogA(x - h)) / (2 * h)
    np.testing.assert_allclose(geo.d_dlogA(x), fd2, rtol=1e-5, atol=1e-4)
    assert float(geo.area(0.25)) == pytest.approx(1.0)
