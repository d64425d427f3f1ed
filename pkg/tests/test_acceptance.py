"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also repeated in the terminal summary (see ``conftest.py``).
Reference series come from the packaged 20000-cell cache.
"""
import time

import numpy as np
import pytest

from ductgrp import accuracy, cases, grp, jets, riemann, scheme
from ductgrp.cli import load_reference
from ductgrp.gas import cons_to_prim
from ductgrp.grp import GRPInput
from ductgrp.scheme import SchemeConfig

from conftest import ACCEPTANCE_LINES, fan_oracle_error, random_states

REF_CELLS = 20000
N_RANDOM = 200

# L1(rho) of the first validated Sod runs at 100 cells, rounded up in the third digit
SOD_L1_BASELINE = {2: 0.0438, 3: 0.0363}


def record(num, title, ok, detail):
    line = f"criterion {num} ({title}): {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _fmt(values, spec=".3g"):
    return "/".join(format(float(v), spec) for v in values)


def _random_input(rng, n, planar=False, riemann_only=False):
    qL, qR = random_states(rng, n), random_states(rng, n)
    if riemann_only:
        z = np.zeros((n, 3))
        return GRPInput.create(qL, qR, z, z, z, z)
    g0 = np.zeros(n) if planar else rng.normal(size=n)
    gp0 = np.zeros(n) if planar else rng.normal(size=n)
    return GRPInput.create(qL, qR, rng.normal(size=(n, 3)), rng.normal(size=(n, 3)),
                           rng.normal(size=(n, 3)), rng.normal(size=(n, 3)), g0, gp0)


def _wave_scale(inp):
    gam = 1.4
    s = [np.abs(q[:, 1]) + np.sqrt(gam * q[:, 2] / q[:, 0]) for q in (inp.qL, inp.qR)]
    return np.maximum(*s)


def test_criterion_1_self_similarity(rng):
    start = time.perf_counter()
    inp = _random_input(rng, N_RANDOM, riemann_only=True)
    scale = _wave_scale(inp)
    lin = grp.solve(inp, 1)
    quad = grp.solve(inp, 2)
    elapsed = time.perf_counter() - start
    e1 = np.max(np.abs(lin.dtQ).max(axis=1) / scale)
    # sonic interfaces carry their second level in the characteristic expansion
    level2 = np.abs(quad.dt2Q).max(axis=1)
    n_sonic = 0
    for sx in quad.sonic:
        _, d1, d2 = sx.fan.invariants_along(np.zeros(sx.index.size), check=False)
        level2[sx.index] = np.maximum(np.abs(d1).max(axis=1) * scale[sx.index],
                                      np.abs(d2).max(axis=1))
        n_sonic += sx.index.size
    e2 = np.max(np.maximum(np.abs(quad.dtQ).max(axis=1) / scale, level2 / scale ** 2))
    ok = e1 <= 1e-9 and e2 <= 1e-6 and elapsed < 5.0
    record(1, "self-similarity", ok,
           f"max|dtQ|/scale={e1:.2e} (<=1e-9), QGRP second level/scale^2={e2:.2e} (<=1e-6, "
           f"{n_sonic} sonic), {elapsed:.2f}s (<5s)")


def test_criterion_2_fan_oracle(rng):
    start = time.perf_counter()
    worst = {}
    for gamma, second in [(1.4, False), (1.4, True), (5.0 / 3.0, False), (3.0, False)]:
        key = f"{'Q' if second else 'L'}{gamma:.3g}"
        worst[key] = max(fan_oracle_error(rng, gamma, second) for _ in range(50))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-7 and elapsed < 30.0
    detail = ", ".join(f"{k}:{v:.1e}" for k, v in worst.items())
    record(2, "L/Q closed forms vs RK oracle", ok, f"{detail} (<=1e-7), {elapsed:.1f}s (<30s)")


def _table(case_name, solver):
    case = cases.get_case(case_name)
    ref = load_reference(case, REF_CELLS)
    assert ref.n_cells >= REF_CELLS
    return accuracy.solver_errors(case, ref, solver)


ACOUSTIC_TABLE = {
    "lgrp1": ([2.420, 4.407e-1, 9.592e-2, 2.251e-2], [2.46, 2.20, 2.09]),
    "qgrp1": ([1.011, 9.861e-2, 1.127e-2, 1.439e-3], [3.36, 3.13, 2.97]),
}


@pytest.mark.slow
def test_criterion_3_acoustic_table():
    ok, parts = True, []
    for solver, (errs, orders) in ACOUSTIC_TABLE.items():
        tab = _table("acoustic", solver)
        ratio = tab.errors / np.asarray(errs)
        ok_o = np.all(np.abs(tab.orders[1:] - orders) <= 0.35)
        ok_m = np.all((ratio >= 0.5) & (ratio <= 2.0))
        ok &= bool(ok_o and ok_m)
        parts.append(f"{solver} orders {_fmt(tab.orders[1:])} vs {_fmt(orders)}, "
                     f"error ratios {_fmt(ratio, '.2f')}")
    record(3, "acoustic table", ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_4_pressure_jumps():
    ok, parts = True, []
    for dp in ("0.01", "1", "100"):
        for solver, target, tol in (("lgrp_inf", 2.0, 0.35), ("qgrp_inf", 3.0, 0.4)):
            tab = _table(f"dp{dp}", solver)
            fine = tab.orders[2:]  # the two finest halvings
            good = bool(np.all(np.abs(fine - target) <= tol))
            ok &= good
            parts.append(f"dp{dp} {solver} {_fmt(fine)}{'' if good else ' <--'}")
    record(4, "pressure-jump tables", ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_5_sonic():
    ok, parts = True, []
    for solver, orders in (("lgrp_inf", [2.06, 2.06, 2.05]), ("qgrp_inf", [3.13, 3.13, 2.91])):
        tab = _table("sonic", solver)
        good = bool(np.all(np.abs(tab.orders[1:] - orders) <= 0.4))
        ok &= good and tab.norm == "Phi"
        detail = f"{solver} Phi orders {_fmt(tab.orders[1:])}"
        if solver == "qgrp_inf":  # only the quadratic solver runs the sonic Newton iteration
            its = tab.newton_iterations
            ok &= len(its) == tab.times.size and max(its, default=99) <= 3
            detail += f", newton iterations {its}"
        parts.append(detail)
    record(5, "sonic table", ok, "; ".join(parts))


def _sod_contact_overshoot(res, case):
    """Largest excursion beyond the two star densities between rarefaction tail and shock."""
    t = res.state.t
    exact = cases.riemann_exact(case, res.state.grid.centers, t)
    x = res.state.grid.centers
    q = res.primitive()
    fan = riemann.solve(np.asarray(case.params["qL"]), np.asarray(case.params["qR"]), case.gas)
    lo, hi = float(np.ravel(fan.left_tail)[0]) * t, float(np.ravel(fan.right_head)[0]) * t
    pad = 3 * res.state.grid.dx
    win = (x > lo + pad) & (x < hi - pad)
    rho_l, rho_r = exact[win, 0].max(), exact[win, 0].min()
    over = np.maximum(q[win, 0] - rho_l, rho_r - q[win, 0]).max()
    return max(float(over), 0.0) / (rho_l - rho_r)


def _shock_density_amplitude(q, x):
    """Peak-to-trough density in the band of width 2.5 behind the shock."""
    jump = np.argmax(q[:-1, 0] - q[1:, 0])
    band = (x > x[jump] - 2.5) & (x <= x[jump])
    return float(q[band, 0].max() - q[band, 0].min()), float(q[band, 0].max())


@pytest.mark.slow
def test_criterion_6_scheme_suite():
    start = time.perf_counter()
    ok, parts = True, []
    sod = cases.get_case("sod")
    for order in (2, 3):
        res = scheme.run(sod, SchemeConfig.for_case(sod, order=order))
        ex = accuracy.exact_cell_averages(lambda x, t: cases.riemann_exact(sod, x, t),
                                          res.state.grid.edges, sod.t_end)
        l1 = float(np.sum(np.abs(res.primitive()[:, 0] - ex[:, 0])) * res.state.grid.dx)
        over = _sod_contact_overshoot(res, sod)
        good = l1 < SOD_L1_BASELINE[order] and over < 0.05
        ok &= good
        parts.append(f"sod GRP{order} L1 {l1:.4f}<{SOD_L1_BASELINE[order]} overshoot {over:.1%}")
    for name in ("123", "blast"):
        case = cases.get_case(name)
        for order in (2, 3):
            res = scheme.run(case, SchemeConfig.for_case(case, order=order),
                             snapshot_times=np.linspace(0.0, case.t_end, 41)[1:-1])
            states = [res.state.U] + list(res.snapshots.values())
            q = np.concatenate([cons_to_prim(U, case.gamma) for U in states])
            good = bool(np.isfinite(q).all() and q[:, 0].min() > 0 and q[:, 2].min() > 0
                        and res.state.t == pytest.approx(case.t_end))
            ok &= good
            parts.append(f"{name} GRP{order} min rho {q[:, 0].min():.2e} min p {q[:, 2].min():.2e}")
    sd = cases.get_case("shock_density")
    amp = {}
    for order in (2, 3):
        res = scheme.run(sd, SchemeConfig.for_case(sd, order=order))
        amp[order] = _shock_density_amplitude(res.primitive(), res.state.grid.centers)
    sharper = amp[3][0] > amp[2][0] and amp[3][1] > amp[2][1]
    ok &= sharper
    parts.append(f"shock-density amplitude/max GRP2 {_fmt(amp[2], '.4f')} "
                 f"GRP3 {_fmt(amp[3], '.4f')}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120.0
    parts.append(f"{elapsed:.0f}s (<120s)")
    record(6, "scheme suite", ok, "; ".join(parts))


def test_criterion_7_conservation_and_rest():
    ok, parts = True, []
    for order in (2, 3):
        case = cases.smooth_wave_case(32)
        res = scheme.run(case, SchemeConfig.for_case(case, order=order, t_end=100.0),
                         max_steps=1000)
        drift = float(np.max(np.abs(res.totals - res.totals[0]) / np.abs(res.totals[0])))
        good = res.steps == 1000 and drift <= 1e-12
        ok &= good
        parts.append(f"periodic GRP{order} drift {drift:.1e} over {res.steps} steps")
    rest = cases.CaseSpec("rest", (0.0, 1.0), 100.0, 1.4, cases.DuctGeometry.laval_nozzle(),
                          lambda x: np.stack([np.ones_like(x), np.zeros_like(x),
                                              np.ones_like(x)], -1),
                          "reflective", "reflective", n_cells=40)
    for order in (2, 3):
        res = scheme.run(rest, SchemeConfig.for_case(rest, order=order), max_steps=100)
        umax = float(np.abs(res.primitive()[:, 1]).max())
        good = res.steps == 100 and umax <= 1e-11
        ok &= good
        parts.append(f"duct rest GRP{order} max|u| {umax:.1e}")
    record(7, "conservation and equilibrium", ok, "; ".join(parts))


def test_criterion_8_nozzle():
    ok, parts = True, []
    a = cases.get_case("nozzle_a")
    dev = {}
    for order in (2, 3):
        res = scheme.run(a, SchemeConfig.for_case(a, order=order))
        sr = res.steady_residual()
        drop = float(np.log10(sr[0] / sr[-1]))
        q = res.primitive()
        mach = float(q[-1, 1] / np.sqrt(a.gamma * q[-1, 2] / q[-1, 0]))
        exact = cases.nozzle_steady(res.state.grid.centers, rho0=a.params["rho0"],
                                    p0=a.params["p0"], gamma=a.gamma)
        dev[order] = float(np.abs(q - exact).max())
        good = drop >= 6.0 and abs(mach - 3.0) <= 0.03 * 3.0
        ok &= good
        parts.append(f"A GRP{order} residual drop {drop:.1f} orders, exit Mach {mach:.4f}, "
                     f"Linf dev {dev[order]:.4f}")
    ok &= dev[3] < dev[2]
    b = cases.get_case("nozzle_b")
    for order in (2, 3):
        res = scheme.run(b, SchemeConfig.for_case(b, order=order))
        sr = res.steady_residual()
        ratio = float(sr[-1] / sr[0])
        ok &= ratio <= 0.1
        parts.append(f"B GRP{order} residual ratio {ratio:.3f} (<=0.1)")
    record(8, "nozzle flows", ok, "; ".join(parts))


def test_criterion_9_mirror_and_smooth(rng):
    ok, parts = True, []
    inp = _random_input(rng, N_RANDOM)
    t = np.full(N_RANDOM, 1e-3)
    for order in (1, 2):
        sol = grp.solve(inp, order)
        back = grp.unmirror(grp.solve(grp.mirror(inp), order))
        err = max(float(np.abs(back.q0 - sol.q0).max()),
                  float(np.abs(back.at(t) - sol.at(t)).max()),
                  float(np.max(np.abs(back.dtQ - sol.dtQ) / (1.0 + np.abs(sol.dtQ)))))
        ok &= err <= 1e-10
        parts.append(f"mirror order {order} max dev {err:.1e}")
    q = random_states(rng, N_RANDOM)
    d, d2 = rng.normal(size=(N_RANDOM, 3)), rng.normal(size=(N_RANDOM, 3))
    g0, gp0 = rng.normal(size=N_RANDOM), rng.normal(size=N_RANDOM)
    sol = grp.solve(GRPInput.create(q, q, d, d, d2, d2, g0, gp0), 2)
    ref = jets.ck_jets(q, d, d2, g0, gp0, 1.4)
    e1 = float(np.max(np.abs(sol.dtQ - ref.qt) / (1.0 + np.abs(ref.qt))))
    e2 = float(np.max(np.abs(sol.dt2Q - ref.qtt) / (1.0 + np.abs(ref.qtt))))
    ok &= e1 <= 1e-12 and e2 <= 1e-11
    parts.append(f"smooth consistency dt {e1:.1e}, dt2 {e2:.1e}")
    record(9, "mirror and smooth consistency", ok, "; ".join(parts))
