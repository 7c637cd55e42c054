"""The eleven acceptance criteria at their stated tolerances.

Scenario runs come from the built-in suite and are shared across criteria
through the session cache in conftest.py.
"""
import json
import time

import numpy as np
import pytest

from voidcell.densities import homogeneous_bulk
from voidcell.elastic import bulk_domain, solve_bulk_cell
from voidcell.geometry import SQUARE, make_stencil
from voidcell.harness.config import ExperimentConfig, builtin_suite, load_suite
from voidcell.harness.runner import run_experiment
from voidcell.maxflow import FlowNetwork, max_flow
from voidcell.oracles import brute_force_mincut

TAU = make_stencil(16).tau
SUITE = [c.scenario for c in load_suite(builtin_suite())]
JUMP_SCENARIOS = ["constant-g-jump", "sinusoid-jump", "counterexample-jump"]


def entries(rep):
    return rep["summary"]["results"]


def test_c01_maxflow_oracle(report):
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        n = int(rng.integers(2, 13))
        s, t = (int(v) for v in rng.choice(n, size=2, replace=False))
        arcs = [(u, v, int(rng.integers(0, 10))) for u in range(n) for v in range(n)
                if u != v and rng.random() < 0.35]
        if max_flow(FlowNetwork.from_arcs(n, s, t, arcs)).flow_value != brute_force_mincut(n, s, t, arcs):
            mismatches += 1
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 5.0
    report(1, ok, f"500 random networks, {mismatches} mismatches", dt)
    assert ok


def test_c02_affine_bulk(report):
    t0 = time.perf_counter()
    dom = bulk_domain(0.5, 1 / 64, (0.0, 0.0), SQUARE)
    f = homogeneous_bulk(1.0)
    ident = solve_bulk_cell(f, dom, (0.0, 0.0), np.eye(2)).normalized
    skew = solve_bulk_cell(f, dom, (0.0, 0.0), np.array([[0.0, 1.0], [-1.0, 0.0]])).normalized
    ok = abs(ident - 2.0) <= 1e-8 and abs(skew) <= 1e-8
    report(2, ok, f"xi=I -> {ident:.12f}, skew -> {skew:.2e}", time.perf_counter() - t0)
    assert ok


def test_c03_laminate(builtin_run, report):
    rep = builtin_run("laminate-antiplane")
    normal, parallel = (e["estimate"] for e in entries(rep))
    ok = (abs(normal - 4 / 3) <= 0.02 * 4 / 3 and abs(parallel - 1.5) <= 0.02 * 1.5
          and rep["seconds"] < 60)
    report(3, ok, f"f_hom normal {normal:.5f} (4/3), parallel {parallel:.5f} (3/2)", rep["seconds"])
    assert ok


def test_c04_flat_cut(builtin_run, report):
    rep = builtin_run("constant-g-void")
    vals = [e["estimate"] for e in entries(rep)]
    worst = max(abs(v - 1.0) for v in vals)
    ok = len(vals) == 8 and worst <= TAU and TAU <= 0.03 and rep["seconds"] < 30
    report(4, ok, f"g=1 over 8 directions, max |g-hat - 1| = {worst:.4f} <= tau {TAU:.4f}",
           rep["seconds"])
    assert ok


def test_c05_stripes(builtin_run, report):
    rep = builtin_run("stripes-void")
    e1, e2 = (e["estimate"] for e in entries(rep))
    tol = TAU + 0.02
    ok = abs(e1 - 1.0) <= tol and abs(e2 - 1.5) <= 1.5 * tol and rep["seconds"] < 120
    report(5, ok, f"stripes g-hat(e1) = {e1:.4f} (1), g-hat(e2) = {e2:.4f} (1.5)", rep["seconds"])
    assert ok


def test_c06_collapsing_voids_identity(builtin_run, report):
    lines, ok, secs = [], True, 0.0
    for name in ("constant-g-jump", "sinusoid-jump"):
        rep = builtin_run(name)
        secs += rep["seconds"]
        for e in entries(rep):
            rel = abs(e["estimate"] - e["companion_2g"]) / e["companion_2g"]
            ok &= rel <= 0.05
            lines.append(f"{name} {e['datum']}: {e['estimate']:.4f} vs {e['companion_2g']:.4f}")
    ok &= secs < 180
    report(6, ok, "h-hat = 2 g-hat within 5%; " + "; ".join(lines), secs)
    assert ok


def test_c07_lower_bound(builtin_run, report):
    checked, ok = 0, True
    for name in JUMP_SCENARIOS:
        for e in entries(builtin_run(name)):
            budget = e["limit"]["gap_budget"]
            ok &= e["estimate"] >= e["companion_2g"] - budget
            checked += 1
    report(7, ok, f"h-hat >= 2 g-hat - budget on {checked} jump estimates")
    assert ok and checked == 5


def test_c08_counterexample(builtin_run, report):
    rep = builtin_run("counterexample-jump")
    e = entries(rep)[0]
    h, g2 = e["estimate"], e["companion_2g"]
    ok = 2.7 <= h <= 3.3 and 1.9 <= g2 <= 2.1 and h - g2 >= 0.5 and rep["seconds"] < 60
    report(8, ok, f"h-hat = {h:.4f}, 2 g-hat = {g2:.4f}, gap = {h - g2:.4f}", rep["seconds"])
    assert ok


def test_c09_growth_bounds(builtin_run, report):
    bad = []
    for name in SUITE:
        for e in entries(builtin_run(name)):
            if not e["growth_bounds"]["ok"]:
                bad.append(f"{name} {e['datum']}")
    ok = not bad
    report(9, ok, f"growth bounds over {len(SUITE)} scenarios" + (f", violations: {bad}" if bad else ""))
    assert ok


def test_c10_gbv(builtin_run, report):
    ok, worst, secs = True, 0.0, 0.0
    for name in ("gbv-constant", "gbv-crystalline"):
        rep = builtin_run(name)
        secs += rep["seconds"]
        assert len(entries(rep)) == 16
        for e in entries(rep):
            g = e["limit"]["pointwise"]
            err = abs(e["estimate"] - g) / g
            worst = max(worst, err)
            ok &= err <= TAU
    rep = builtin_run("gbv-nonconvex")
    secs += rep["seconds"]
    e = entries(rep)[0]
    ok &= e["estimate"] < 2.0 - e["tolerance"]
    ok &= secs < 30
    report(10, ok, f"norms reproduced within {worst:.4f} <= tau; 2-|nu1| at e2 -> "
               f"{e['estimate']:.4f} (budget {e['tolerance']:.4f})", secs)
    assert ok


def test_c11_determinism(tmp_path, report):
    doc = {"scenario": "det-jump", "kind": "jump",
           "family": {"name": "sinusoid-surface", "params": {"period": 1.0}},
           "data": [{"nu_deg": 0.0}, {"nu_deg": 90.0}],
           "rho_list": [0.5, 0.25], "eps_list": [0.125, 0.0625, 0.03125], "spacing": 1 / 64}
    cfg = ExperimentConfig.from_dict(doc)
    t0 = time.perf_counter()
    runs = {}
    for label, jobs in (("a", 1), ("b", 1), ("c", 8)):
        run_experiment(cfg, str(tmp_path / label), jobs=jobs)
        runs[label] = [(tmp_path / label / f"det-jump.{ext}").read_bytes() for ext in ("csv", "json")]
    ok = runs["a"] == runs["b"] == runs["c"]
    report(11, ok, "reports byte-identical over two runs and jobs=1 vs jobs=8",
           time.perf_counter() - t0)
    assert ok
