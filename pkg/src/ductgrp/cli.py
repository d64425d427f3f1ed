"""Command-line front end.

Commands
--------
solver-test   error/order table of one GRP solver at ``x = 0``
run           finite-volume run of a benchmark case, profile CSV
convergence   refinement ladders (smooth scheme test or solver halvings)
reference     pre-compute fine-mesh reference series

Every command writes CSV with ``#`` metadata lines; the first line names the
schema and its version.  Output is a pure function of the arguments, so two
identical invocations give identical bytes.
"""
from __future__ import annotations

import argparse
import configparser
import io
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import accuracy, cases, reference, scheme
from .errors import DuctGRPError
from .gas import cons_to_prim

SCHEMA_VERSION = 1
DEFAULT_REF_CELLS = 20000

log = logging.getLogger("ductgrp")


def packaged_reference_dir() -> Path:
    return Path(str(resources.files("ductgrp") / "data" / "references"))


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(out, schema: str, meta: dict, columns, rows) -> str:
    """Render a CSV table with metadata header lines; write it to ``out`` unless it is None."""
    buf = io.StringIO()
    buf.write(f"# ductgrp-{schema} v{SCHEMA_VERSION}\n")
    for k, v in meta.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    return text


def _finest(directory: Path, name: str, n_cells: int):
    """Path of the finest ``<name>_<n>.csv`` in ``directory`` with ``n >= n_cells``."""
    best = None
    for path in directory.glob(f"{name}_*.csv"):
        suffix = path.stem[len(name) + 1:]
        if suffix.isdigit() and int(suffix) >= n_cells and (best is None or int(suffix) > best[0]):
            best = (int(suffix), path)
    return None if best is None else best[1]


def load_reference(case, n_cells: int, ref_dir=None, compute: bool = True):
    """Reference series with at least ``n_cells`` cells.

    An exact match in ``ref_dir`` wins; otherwise the finest packaged series
    that is at least as fine is used, and failing both it is computed (and
    cached in ``ref_dir`` or the working directory).
    """
    if ref_dir:
        path = Path(ref_dir) / f"{case.name}_{n_cells}.csv"
        if path.exists():
            return reference.ReferenceSeries.from_csv(path)
    path = _finest(packaged_reference_dir(), case.name, n_cells)
    if path is not None:
        return reference.ReferenceSeries.from_csv(path)
    if not compute:
        raise FileNotFoundError(f"no cached reference for {case.name} at {n_cells} cells")
    target = Path(ref_dir) if ref_dir else Path(".")
    return reference.cached_reference(case, target, n_cells)


def _parse_floats(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(",", " ").split()]


def _apply_config(args, given: set):
    """Fill options not given on the command line from the INI section of the case.

    Keys in ``[DEFAULT]`` apply to every section.
    """
    if not getattr(args, "config", None):
        return args
    cp = configparser.ConfigParser()
    if not cp.read(args.config):
        raise FileNotFoundError(args.config)
    section = getattr(args, "case", None) or args.command
    items = cp[section] if cp.has_section(section) else cp.defaults()
    for key, val in items.items():
        attr = key.replace("-", "_")
        if attr in given or not hasattr(args, attr) or attr in ("command", "func", "config"):
            continue
        cur = getattr(args, attr)
        if isinstance(cur, bool):
            val = val.strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(cur, int):
            val = int(val)
        elif isinstance(cur, float):
            val = float(val)
        setattr(args, attr, val)
    return args


# -- commands -----------------------------------------------------------------

def solver_table(case, solver: str, times=None, n_cells: int = DEFAULT_REF_CELLS, ref_dir=None):
    ref = load_reference(case, n_cells, ref_dir)
    return accuracy.solver_errors(case, ref, solver, times), ref


def cmd_solver_test(args) -> int:
    case = cases.get_case(args.case)
    if not case.is_solver_case:
        raise ValueError(f"{case.name} is not a solver accuracy case")
    solver = args.solver
    if args.mode:
        order = 2 if solver.startswith("q") else 1
        solver = {(1, "acoustic"): "lgrp1", (1, "exact"): "lgrp_inf",
                  (2, "acoustic"): "qgrp1", (2, "exact"): "qgrp_inf"}[(order, args.mode)]
    table, ref = solver_table(case, solver, _parse_floats(args.times), args.cells, args.refs)
    meta = dict(command="solver-test", case=case.name, solver=solver, norm=table.norm,
                reference_cells=ref.n_cells, newton_max=max(table.newton_iterations, default=0))
    rows = [(t, e, "" if np.isnan(o) else o) for t, e, o in table.rows()]
    write_csv(args.out, "solver-test", meta, ["t", "error_linf", "order"], rows)
    return 0


def _exact_columns(case, x, t):
    if case.name in ("sod", "123"):
        return cases.riemann_exact(case, x, t)
    if case.reference == "steady":
        return cases.nozzle_steady(x, rho0=case.params["rho0"], p0=case.params["p0"],
                                   gamma=case.gamma)
    if case.name == "smooth_wave":
        return cases.smooth_wave_exact(x, t)
    return None


def cmd_run(args) -> int:
    case = cases.get_case(args.case)
    if case.name == "smooth_wave" and args.cells:
        case = cases.smooth_wave_case(args.cells)
    over = dict(order=args.order, cfl=args.cfl, grp_mode=args.mode or "exact")
    if args.t_end is not None:
        over["t_end"] = args.t_end
    cfg = scheme.SchemeConfig.for_case(case, **over)
    res = scheme.run(case, cfg, n_cells=args.cells or None)
    q = cons_to_prim(res.state.U, cfg.gamma)
    x = res.state.grid.centers
    e = q[:, 2] / ((cfg.gamma - 1.0) * q[:, 0])
    cols = ["x", "rho", "u", "p", "e"]
    data = [x, q[:, 0], q[:, 1], q[:, 2], e]
    ex = _exact_columns(case, x, res.state.t)
    if ex is not None:
        cols += ["rho_exact", "u_exact", "p_exact"]
        data += [ex[:, 0], ex[:, 1], ex[:, 2]]
    tot = res.totals
    drift = tot[-1] - tot[0]  # includes boundary fluxes unless periodic
    sr = res.steady_residual()
    meta = dict(command="run", case=case.name, order=cfg.order, cfl=cfg.cfl, mode=cfg.grp_mode,
                cells=x.size, t=res.state.t, steps=res.steps, fallbacks=res.fallbacks,
                mass_change=drift[0], momentum_change=drift[1], energy_change=drift[2],
                residual_first=sr[0] if sr.size else 0.0,
                residual_last=sr[-1] if sr.size else 0.0)
    write_csv(args.out, "profile", meta, cols, zip(*data))
    return 0


def cmd_convergence(args) -> int:
    if args.test == "smooth_scheme":
        levels = [int(v) for v in _parse_floats(args.levels)] if args.levels else [20, 40, 80, 160]
        conv = accuracy.smooth_convergence(args.order, levels, args.cfl)
        rows = [(int(n), a, "" if np.isnan(oa) else oa, b, "" if np.isnan(ob) else ob)
                for n, a, oa, b, ob in zip(conv.n_cells, conv.l1, conv.l1_orders,
                                           conv.linf, conv.linf_orders)]
        meta = dict(command="convergence", test="smooth_scheme", order=args.order, cfl=args.cfl)
        write_csv(args.out, "convergence", meta,
                  ["cells", "l1", "l1_order", "linf", "linf_order"], rows)
        return 0
    case = cases.get_case(args.case)
    table, ref = solver_table(case, args.solver, None, args.cells, args.refs)
    meta = dict(command="convergence", test="solver", case=case.name, solver=args.solver,
                norm=table.norm, reference_cells=ref.n_cells)
    rows = [(t, e, "" if np.isnan(o) else o) for t, e, o in table.rows()]
    write_csv(args.out, "solver-test", meta, ["t", "error_linf", "order"], rows)
    return 0


def cmd_reference(args) -> int:
    names = [c.name for c in cases.solver_cases()] if args.case in (None, "all") else [args.case]
    out = Path(args.out or ".")
    for name in names:
        case = cases.get_case(name)
        path = out / f"{case.name}_{args.cells}.csv"
        if path.exists() and not args.force:
            log.info("%s exists, skipping", path)
            continue
        ref = reference.godunov_reference(case, args.cells)
        out.mkdir(parents=True, exist_ok=True)
        ref.to_csv(path)
        print(path)
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ductgrp", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="INI file; sections named after cases supply defaults")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    st = sub.add_parser("solver-test", help="GRP solver error table at x = 0")
    st.add_argument("--case", default="acoustic")
    st.add_argument("--solver", default="qgrp_inf", choices=sorted(accuracy.SOLVERS))
    st.add_argument("--mode", choices=("exact", "acoustic"), default=None,
                    help="override the acoustic/exact variant of --solver")
    st.add_argument("--times", default=None, help="comma separated sample times")
    st.add_argument("--cells", type=int, default=DEFAULT_REF_CELLS, help="reference mesh size")
    st.add_argument("--refs", default=None, help="reference cache directory")
    st.add_argument("--out", default="-")
    st.set_defaults(func=cmd_solver_test)

    r = sub.add_parser("run", help="finite-volume run of a benchmark case")
    r.add_argument("--case", default="sod")
    r.add_argument("--order", type=int, default=2, choices=(2, 3))
    r.add_argument("--cells", type=int, default=0, help="0 keeps the case default")
    r.add_argument("--cfl", type=float, default=0.5)
    r.add_argument("--mode", choices=("exact", "acoustic", "auto"), default="exact")
    r.add_argument("--t-end", type=float, default=None)
    r.add_argument("--out", default="-")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("convergence", help="refinement ladders")
    c.add_argument("--test", choices=("smooth_scheme", "solver"), default="smooth_scheme")
    c.add_argument("--order", type=int, default=3, choices=(2, 3))
    c.add_argument("--levels", default=None, help="comma separated cell counts")
    c.add_argument("--cfl", type=float, default=0.5)
    c.add_argument("--case", default="acoustic")
    c.add_argument("--solver", default="qgrp_inf", choices=sorted(accuracy.SOLVERS))
    c.add_argument("--cells", type=int, default=DEFAULT_REF_CELLS)
    c.add_argument("--refs", default=None)
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_convergence)

    f = sub.add_parser("reference", help="pre-compute fine-mesh references")
    f.add_argument("--case", default="all")
    f.add_argument("--cells", type=int, default=DEFAULT_REF_CELLS)
    f.add_argument("--force", action="store_true")
    f.add_argument("--out", default=None, help="cache directory")
    f.set_defaults(func=cmd_reference)
    return p


def _given_options(argv) -> set:
    keys = set()
    for tok in argv:
        if tok.startswith("--"):
            keys.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    return keys


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _apply_config(args, _given_options(argv))
        return args.func(args)
    except (DuctGRPError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"ductgrp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
