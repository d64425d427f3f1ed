import numpy as np
import pytest

from ductgrp import reconstruct
from ductgrp.gas import cons_to_prim, prim_to_cons


def _averages(f, n=40, ghosts=3, a=0.0, b=1.0):
    dx = (b - a) / n
    edges = a + dx * np.arange(-ghosts, n + ghosts + 1)
    xg, wg = np.polynomial.legendre.leggauss(5)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = mid[:, None] + 0.5 * dx * xg
    return 0.5 * np.einsum("nkc,k->nc", f(pts), wg), edges, dx


def _smooth_cons(x):
    q = np.stack([1.0 + 0.2 * np.sin(2 * np.pi * x), 0.5 + 0.1 * np.cos(2 * np.pi * x),
                  1.0 + 0.1 * np.sin(4 * np.pi * x)], axis=-1)
    return prim_to_cons(q, 1.4)


def test_van_leer_values():
    assert reconstruct.van_leer(1.0, 1.0) == 1.0
    assert reconstruct.van_leer(1.0, -1.0) == 0.0
    assert reconstruct.van_leer(1.0, 3.0) == pytest.approx(1.5)
    assert reconstruct.van_leer(0.0, 0.0) == 0.0


def test_muscl_reproduces_linear():
    U = np.stack([np.arange(10.0), 2 * np.arange(10.0), np.full(10, 3.0)], axis=-1) + 1.0
    poly = reconstruct.reconstruct_muscl(U)
    np.testing.assert_allclose(poly.coef[1:-1, 0, 1], 1.0)
    np.testing.assert_allclose(poly.coef[1:-1, 1, 1], 2.0)
    np.testing.assert_allclose(poly.coef[1:-1, 2, 1], 0.0)


def test_muscl_flat_at_extrema():
    U = np.array([[0.0], [1.0], [0.0]]) * np.ones((1, 3)) + 1.0
    assert np.all(reconstruct.reconstruct_muscl(U).coef[1, :, 1] == 0.0)


def test_constant_state_reproduced():
    U = np.tile(prim_to_cons(np.array([1.0, 0.3, 2.0]), 1.4), (12, 1))
    poly, (minus, plus) = reconstruct.reconstruct_weno3(U, 1.4)
    np.testing.assert_allclose(minus, np.broadcast_to(U[0], minus.shape), rtol=1e-14)
    np.testing.assert_allclose(poly.coef[..., 1:], 0.0, atol=1e-13)


@pytest.mark.parametrize("deg", [1, 2])
def test_weno_polynomial_reproduction(deg):
    # polynomial averages of degree <= 2 reconstruct to the exact face values
    def f(x):
        return np.stack([2.0 + x ** deg, 0.5 * (2.0 + x ** deg), 5.0 + x ** deg], axis=-1)
    U, edges, dx = _averages(f, n=10)
    poly, (minus, plus) = reconstruct.reconstruct_weno3(U, 1.4)
    faces = edges[3:-3]
    exact = f(faces)
    np.testing.assert_allclose(minus, exact, rtol=1e-9)
    np.testing.assert_allclose(plus, exact, rtol=1e-9)
    np.testing.assert_allclose(poly.mean(), U[3:-3], rtol=1e-14)


def test_weno5_face_order():
    errs = []
    for n in (20, 40, 80):
        U, edges, dx = _averages(_smooth_cons, n=n)
        minus, _ = reconstruct.weno5_faces(U, 1.4)
        errs.append(np.abs(minus - _smooth_cons(edges[3:-3])).max())
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert rates[-1] >= 4.5


def test_cell_poly_derivatives():
    coef = np.zeros((1, 3, 3))
    coef[0, :, 0] = 1.0
    coef[0, :, 1] = 2.0
    coef[0, :, 2] = 3.0
    poly = reconstruct.CellPoly(coef, 0.5)
    np.testing.assert_allclose(poly.value(0.5), 1 + 1 + 3 * (0.25 - 1 / 12))
    np.testing.assert_allclose(poly.dx1(0.5), (2 + 3) / 0.5)
    np.testing.assert_allclose(poly.dx2(), 6 / 0.25)
    assert poly.degree == 2
    U, Ux, Uxx = poly.face_jets("L")
    np.testing.assert_allclose(Ux, (2 - 3) / 0.5)


def test_primitive_jets_chain_rule():
    x0, h = 0.3, 1e-4
    q = lambda x: cons_to_prim(_smooth_cons(np.array([x])), 1.4)[0]
    U = _smooth_cons(np.array([x0 - h, x0, x0 + h]))
    Ux = (U[2] - U[0]) / (2 * h)
    Uxx = (U[2] - 2 * U[1] + U[0]) / h ** 2
    qq, qx, qxx = reconstruct.primitive_jets(U[1:2], Ux[None], Uxx[None], 1.4)
    np.testing.assert_allclose(qq[0], q(x0), rtol=1e-12)
    np.testing.assert_allclose(qx[0], (q(x0 + h) - q(x0 - h)) / (2 * h), rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(qxx[0], (q(x0 + h) - 2 * q(x0) + q(x0 - h)) / h ** 2, rtol=1e-4, atol=1e-4)
