import numpy as np
import pytest

from ductgrp import cases, reference, riemann
from ductgrp.reference import ReferenceSeries


def _small_ref(n=400):
    return reference.godunov_reference(cases.acoustic_case(), n)


def test_csv_round_trip(tmp_path):
    ref = _small_ref()
    path = tmp_path / "r.csv"
    ref.to_csv(path)
    back = ReferenceSeries.from_csv(path)
    np.testing.assert_array_equal(back.times, ref.times)
    np.testing.assert_array_equal(back.states, ref.states)
    assert back.n_cells == 400 and back.dx == ref.dx and back.case == "acoustic"
    assert path.read_text().startswith("# ductgrp-reference v1")


def test_sample_times_cover_case_times():
    ref = _small_ref()
    for t in cases.acoustic_case().times:
        ref.at(t)
    with pytest.raises(KeyError):
        ref.at(0.0123456)


def test_odd_mesh_rejected():
    with pytest.raises(ValueError):
        reference.godunov_reference(cases.acoustic_case(), 401)


def test_early_window_pinned_to_riemann_value():
    case = cases.pressure_jump_case(1.0)
    ref = reference.godunov_reference(case, 400)
    inp = case.grp_input()
    q00 = riemann.sample(riemann.solve(inp.qL, inp.qR, inp.gas), 0.0)[0]
    assert ref.times[0] < 0.05 * case.params["t0"]
    # the first sample sits close to the cubic's pinned t=0+ value
    assert np.abs(ref.states[0] - q00).max() < 0.05 * np.abs(q00).max()


def test_coarse_reference_converges_toward_packaged():
    from ductgrp.cli import load_reference
    case = cases.acoustic_case()
    fine = load_reference(case, 20000, compute=False)
    errs = []
    for n in (500, 1000):
        ref = reference.godunov_reference(case, n)
        errs.append(np.abs(ref.at(0.05)[0] - fine.at(0.05)[0]).max())
    assert errs[1] < 0.6 * errs[0]


def test_cached_reference_reuses_file(tmp_path):
    case = cases.acoustic_case()
    a = reference.cached_reference(case, tmp_path, 200)
    b = reference.cached_reference(case, tmp_path, 200)
    np.testing.assert_array_equal(a.states, b.states)
    assert (tmp_path / "acoustic_200.csv").exists()


def test_series_accessors():
    ref = _small_ref(200)
    assert ref.conserved().shape == ref.states.shape
    assert ref.invariants().shape == ref.states.shape


def test_trace_fit_reproduces_polynomial_record():
    case = cases.pressure_jump_case(1.0)
    inp = case.grp_input()
    q00 = riemann.sample(riemann.solve(inp.qL, inp.qR, inp.gas), 0.0)[0]
    t0 = case.params["t0"]
    tt = np.linspace(0.0, t0, 500)[1:]
    coef = np.array([[0.1, -0.3, 0.2], [0.05, 0.02, -0.4], [-0.2, 0.1, 0.3]])
    s = tt / t0
    tq = q00 + s[:, None] * coef[0] + s[:, None] ** 2 * coef[1] + s[:, None] ** 3 * coef[2]
    times = np.array(case.times)
    out = reference._trace_fit(case, times, tt, tq, t0, 6)
    sv = times / t0
    expect = q00 + sv[:, None] * coef[0] + sv[:, None] ** 2 * coef[1] + sv[:, None] ** 3 * coef[2]
    np.testing.assert_allclose(out, expect, rtol=1e-8, atol=1e-12)  # finite pin weight


def test_fit_and_raw_samples_agree_on_coarse_mesh():
    case = cases.acoustic_case()
    raw = reference.godunov_reference(case, 400, fit_degree=None)
    fit = reference.godunov_reference(case, 400)
    assert fit.meta["fit_degree"] == reference.FIT_DEGREE
    scale = np.abs(raw.states).max()
    late = raw.times >= 0.2 * raw.times.max()
    assert np.abs(fit.states[late] - raw.states[late]).max() < 1e-3 * scale


def test_load_reference_prefers_finest_packaged(tmp_path):
    from ductgrp import cli
    case = cases.acoustic_case()
    small = reference.godunov_reference(case, 200)
    small.to_csv(tmp_path / "acoustic_200.csv")
    assert cli.load_reference(case, 200, tmp_path).n_cells == 200
    assert cli.load_reference(case, 300, tmp_path, compute=False).n_cells >= 20000
    with pytest.raises(FileNotFoundError):
        cli.load_reference(case, 10 ** 7, tmp_path, compute=False)
