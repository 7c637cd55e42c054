"""Command line entry point.

Exit codes: 0 success, 1 a suite or scenario expectation failed, 2 a solver
raised, 3 the configuration was rejected.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import jsonschema
import numpy as np

from voidcell.geometry import calibration_directions, make_stencil, stencil_calibration
from voidcell.harness.config import (ConfigError, ExperimentConfig, builtin_suite, load_schema,
                                     load_suite)
from voidcell.harness.families import family_type
from voidcell.harness.runner import SolverFailure, rounded, run_experiment, run_suite, solve_task
from voidcell.render import codes_svg, read_pgm

EXIT_OK, EXIT_FAILED, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2, 3


def _apply_globals(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.spacing is not None:
        if cfg.kind == "bulk":
            cfg.cells_per_period = args.spacing
        else:
            cfg.cells_per_rho = args.spacing
            cfg.spacing = None
    if args.stencil is not None:
        cfg.stencil = args.stencil
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.out is not None:
        cfg.out = args.out
    cfg.check()
    return cfg


def _param(text):
    key, _, val = text.partition("=")
    try:
        return key, json.loads(val)
    except json.JSONDecodeError:
        return key, val


def cmd_cell(args) -> int:
    datum = {"xi": args.xi} if args.xi else {"nu_deg": args.nu_deg}
    doc = {"scenario": "cell", "kind": args.kind,
           "family": {"name": args.family, "params": dict(_param(p) for p in args.param)},
           "data": [datum], "x": args.x, "shape": args.shape}
    try:
        # a single solve skips the sweep rules, so only the schema applies
        jsonschema.validate(doc, load_schema())
        cfg = ExperimentConfig(**{**doc, "x": tuple(args.x)})
        family_type(args.family)
    except (jsonschema.ValidationError, KeyError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else f"unknown {exc}"
        print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    if args.spacing is not None:
        cfg.cells_per_rho = cfg.cells_per_period = args.spacing
    if args.stencil is not None:
        cfg.stencil = args.stencil
    rho = args.rho
    if args.kind == "bulk":
        h = 1.0 / cfg.cells_per_period
        task = dict(role="bulk", datum=0, rho=rho, eps=None, spacing=h)
    elif args.kind in ("void", "jump"):
        h = rho / cfg.cells_per_rho
        eps = args.eps if args.eps is not None else (4 * h if args.kind == "jump" else None)
        task = dict(role=args.kind, datum=0, rho=rho, eps=eps, spacing=h)
    elif args.kind == "gbv":
        task = dict(role="gbv", datum=0, rho=1.0, eps=None, spacing=1.0 / cfg.cells_per_rho)
    else:
        task = dict(role="fqc", datum=0, rho=None, eps=None, spacing=None)
    try:
        res = solve_task(cfg.to_dict(), task, keep_artifact=bool(args.out))
    except Exception as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    art = res.pop("artifact", None)
    print(json.dumps(rounded(res), indent=2, sort_keys=True))
    if args.out and art is not None and art[0] == "labels":
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"cell_{args.kind}.svg"), "w") as fh:
            fh.write(codes_svg(art[1], title=f"{args.kind} {args.family}",
                               three_label=args.kind == "jump"))
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        cfg = _apply_globals(ExperimentConfig.from_json(args.config), args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rep = run_experiment(cfg, cfg.out, cfg.jobs)
    except SolverFailure as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    s = rep["summary"]
    for e in s["results"]:
        print(f"{s['scenario']} {e['datum']}: {e['estimate']:.6g} +- {e['tolerance']:.3g}")
    return EXIT_OK if s["passed"] else EXIT_FAILED


def cmd_suite(args) -> int:
    try:
        cfgs = load_suite(args.suite) if args.suite else load_suite(builtin_suite())
        cfgs = [_apply_globals(c, args) for c in cfgs]
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rep = run_suite(cfgs, args.out, args.jobs)
    except SolverFailure as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    for s in rep["scenarios"]:
        print(f"{'PASS' if s['passed'] else 'FAIL'} {s['scenario']}")
        for c in s["expectations"]:
            if not c["passed"]:
                print(f"    expected {c['quantity']} of datum {c['datum']}, observed {c['observed']}")
        for msg in s["automatic_failures"]:
            print(f"    {msg}")
    return EXIT_OK if rep["passed"] else EXIT_FAILED


def cmd_calibrate(args) -> int:
    dirs = calibration_directions()
    lines = ["stencil,tau"]
    for size in (4, 8, 16):
        st = make_stencil(size)
        tau = stencil_calibration(st, dirs)
        print(f"n{size}: tau = {tau:.6f}")
        lines.append(f"n{size},{tau:.12g}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        st = make_stencil(args.stencil or 16)
        rows = ["angle_deg,relative_error"]
        err = st.line_cost(dirs) - 1.0
        for nu, e in zip(dirs, err):
            rows.append(f"{np.degrees(np.arctan2(nu[1], nu[0])):.12g},{e:.12g}")
        with open(os.path.join(args.out, "calibration.csv"), "w") as fh:
            fh.write("\n".join(lines) + "\n")
        with open(os.path.join(args.out, f"calibration_{st.name}.csv"), "w") as fh:
            fh.write("\n".join(rows) + "\n")
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        img, comments = read_pgm(args.pgm)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    meta = dict(c.split(" ", 1) for c in comments if " " in c)
    out = args.out or os.path.dirname(os.path.abspath(args.pgm))
    os.makedirs(out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.pgm))[0]
    title = " ".join(meta.get(k, "") for k in ("scenario", "datum")).strip() or stem
    svg = codes_svg(img, cell_px=args.cell_px, title=title,
                    three_label=meta.get("kind") == "jump" or None)
    path = os.path.join(out, stem + ".svg")
    with open(path, "w") as fh:
        fh.write(svg)
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="voidcell", description="cell-formula density solver")
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, help="parallel worker processes")
    p.add_argument("--spacing", type=int, metavar="CELLS_PER_RHO",
                   help="lattice cells per radius (cells per period for bulk)")
    p.add_argument("--stencil", type=int, choices=(8, 16))
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cell", help="one cell solve")
    c.add_argument("--kind", required=True, choices=("bulk", "void", "jump", "gbv", "fqc"))
    c.add_argument("--family", required=True)
    c.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    c.add_argument("--nu-deg", type=float, default=0.0)
    c.add_argument("--xi", type=float, nargs=4)
    c.add_argument("--rho", type=float, default=1.0, help="radius, or cube side in periods (bulk)")
    c.add_argument("--eps", type=float)
    c.add_argument("--x", type=float, nargs=2, default=[0.0, 0.0])
    c.add_argument("--shape", choices=("disc", "square"), default="disc")
    c.set_defaults(func=cmd_cell)

    s = sub.add_parser("sweep", help="run one scenario config")
    s.add_argument("config")
    s.set_defaults(func=cmd_sweep)

    u = sub.add_parser("suite", help="run a suite (default: the built-in acceptance suite)")
    u.add_argument("suite", nargs="?")
    u.set_defaults(func=cmd_suite)

    k = sub.add_parser("calibrate", help="stencil calibration report")
    k.set_defaults(func=cmd_calibrate)

    r = sub.add_parser("render", help="SVG from a stored PGM label dump")
    r.add_argument("pgm")
    r.add_argument("--cell-px", type=int, default=4)
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
