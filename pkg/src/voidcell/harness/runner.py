"""Sweep execution, aggregation and deterministic reports."""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from types import SimpleNamespace

import numpy as np

from voidcell.densities import strain_sq
from voidcell.elastic import FemMesh, bulk_domain, bulk_sequence, solve_bulk_cell
from voidcell.geometry import SQUARE, make_stencil
from voidcell.harness.config import ConfigError, ExperimentConfig
from voidcell.harness.families import build_density
from voidcell.jump import attach_companion, solve_jump_cell
from voidcell.relaxation import fqc_envelope, gbv_envelope
from voidcell.render import deformed_mesh_svg, label_codes, codes_svg, write_pgm
from voidcell.surface import aggregate, cell_domain, solve_void_cell

CSV_COLUMNS = ("scenario", "kind", "datum", "rho", "eps_or_r", "spacing", "raw_energy",
               "normalized_density", "tolerance", "optimizer_flag")
SIG = 12


class SolverFailure(RuntimeError):
    """A cell solve raised; carries the task that failed."""


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{SIG}g}"
    return str(v)


def rounded(obj):
    """Floats to 12 significant digits, recursively, for byte-stable JSON."""
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not np.isfinite(v):
            return str(v)
        return float(f"{v:.{SIG}g}")
    return obj


def datum_label(d: dict) -> str:
    if "nu_deg" in d:
        return f"nu={d['nu_deg']:g}deg"
    return "xi=[" + " ".join(f"{v:g}" for v in d["xi"]) + "]"


def _nu(d):
    t = np.deg2rad(d["nu_deg"])
    return np.array([np.cos(t), np.sin(t)])


def _xi(d):
    return np.asarray(d["xi"], dtype=float).reshape(2, 2)


def _periodic(cfg: ExperimentConfig) -> bool:
    return build_density(cfg.family["name"], cfg.family.get("params"), None).period is not None


def plan_tasks(cfg: ExperimentConfig) -> list[dict]:
    """Independent solves, in a fixed order.  Fixed (non-periodic) surface
    densities share one void solve across all eps."""
    tasks = []
    periodic = cfg.kind in ("void", "jump") and _periodic(cfg)
    for k, _ in enumerate(cfg.data):
        if cfg.kind in ("void", "jump"):
            for rho in sorted(cfg.rho_list, reverse=True):
                h = cfg.cell_spacing(rho)
                eps_all = sorted(cfg.eps_list, reverse=True)
                if cfg.kind == "jump":
                    tasks += [dict(role="jump", datum=k, rho=rho, eps=e, spacing=h) for e in eps_all]
                if cfg.kind == "void" or cfg.companion:
                    role = "void" if cfg.kind == "void" else "companion"
                    if periodic:
                        tasks += [dict(role=role, datum=k, rho=rho, eps=e, spacing=h) for e in eps_all]
                    else:
                        tasks.append(dict(role=role, datum=k, rho=rho, eps=None, spacing=h))
        elif cfg.kind == "bulk":
            for r in sorted(cfg.r_list):
                tasks.append(dict(role="bulk", datum=k, rho=r, eps=None,
                                  spacing=_period(cfg) / cfg.cells_per_period))
        elif cfg.kind == "gbv":
            tasks.append(dict(role="gbv", datum=k, rho=1.0, eps=None, spacing=1.0 / cfg.cells_per_rho))
        else:
            tasks.append(dict(role="fqc", datum=k, rho=None, eps=None, spacing=None))
    return tasks


def _period(cfg):
    f = build_density(cfg.family["name"], cfg.family.get("params"), None)
    return f.period or 1.0


_STENCILS = {}


def _stencil(size):
    if size not in _STENCILS:
        _STENCILS[size] = make_stencil(size)
    return _STENCILS[size]


def solve_task(cfg_dict: dict, task: dict, keep_artifact: bool = False) -> dict:
    """Run one cell solve; pure function of (config, task)."""
    cfg = ExperimentConfig(**cfg_dict)
    d = cfg.data[task["datum"]]
    h = task["spacing"]
    dens = build_density(cfg.family["name"], cfg.family.get("params"), h)
    x = np.asarray(cfg.x, dtype=float)
    role = task["role"]
    out = {"task": task, "artifact": None}
    if role in ("void", "companion", "jump"):
        g = dens.rescaled(task["eps"]) if dens.period is not None and task["eps"] else dens
        dom = cell_domain(task["rho"], h, x, cfg.shape, cfg.collar_cells)
        st = _stencil(cfg.stencil)
        if role == "jump":
            res = solve_jump_cell(g, dom, x, _nu(d), task["eps"], st)
            flag = res.diagnostics["optimizer"]
        else:
            res = solve_void_cell(g, dom, x, _nu(d), st)
            flag = "mincut"
        if keep_artifact:
            out["artifact"] = ("labels", label_codes(res.labels))
    elif role == "gbv":
        res = gbv_envelope(dens, x, _nu(d), cfg.cells_per_rho, _stencil(cfg.stencil), cfg.collar_cells)
        flag = "mincut"
        if keep_artifact:
            out["artifact"] = ("labels", label_codes(res.labels))
    elif role == "bulk":
        side = task["rho"] * (dens.period or 1.0)
        dom = bulk_domain(side / 2, h, (0.0, 0.0), SQUARE, cfg.collar_cells)
        res = solve_bulk_cell(dens, dom, (0.0, 0.0), _xi(d))
        flag = "cg"
        if keep_artifact:
            out["artifact"] = ("field", res.field)
    else:
        env = fqc_envelope(dens, x, _xi(d), cross_check=cfg.cross_check)
        res = SimpleNamespace(raw_energy=env["value"], normalized=env["value"],
                              tolerance=env.get("cross_check_tolerance", 1e-12),
                              diagnostics={"cross_check": env["cross_check"]})
        flag = "closed-form"
    out.update(raw=float(res.raw_energy), normalized=float(res.normalized),
               tolerance=float(res.tolerance), flag=flag,
               diagnostics={k: v for k, v in res.diagnostics.items()
                            if isinstance(v, (int, float, str, bool, type(None)))})
    return out


def _call(args):
    cfg_dict, task, keep = args
    try:
        return solve_task(cfg_dict, task, keep)
    except Exception as exc:          # reported to the parent as a solver error
        return {"task": task, "error": f"{type(exc).__name__}: {exc}"}


def _artifact_task(cfg, tasks):
    """Index of the task whose labels/field get rendered, per datum."""
    pick = {}
    for i, t in enumerate(tasks):
        if t["role"] == "companion":
            continue
        key = t["datum"]
        if t["role"] == "bulk":
            score = (-t["rho"],)
        else:
            score = (t["rho"] or 0.0, -(t["eps"] or 0.0))
        if key not in pick or score > pick[key][0]:
            pick[key] = (score, i)
    return {i for _, i in pick.values()}


def execute(cfg: ExperimentConfig, jobs: int | None = None) -> list[dict]:
    tasks = plan_tasks(cfg)
    keep = _artifact_task(cfg, tasks)
    cfg_dict = cfg.to_dict()
    args = [(cfg_dict, t, i in keep) for i, t in enumerate(tasks)]
    jobs = jobs or cfg.jobs or 1
    if jobs <= 1 or len(tasks) <= 1:
        results = [_call(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_call, args, chunksize=1))
    for r in results:
        if "error" in r:
            raise SolverFailure(f"{cfg.scenario} {r['task']}: {r['error']}")
    return results


def _cells(results, role, datum, eps_list=None):
    cells = []
    for r in results:
        t = r["task"]
        if t["role"] != role or t["datum"] != datum:
            continue
        cr = SimpleNamespace(normalized=r["normalized"], tolerance=r["tolerance"])
        if t["eps"] is None and eps_list:
            cells += [(t["rho"], e, cr) for e in eps_list]
        else:
            cells.append((t["rho"], t["eps"], cr))
    return cells


def _growth(cfg, dens, datum, estimate, tolerance, results) -> dict:
    """Growth-bound inheritance for the estimate and every cell value."""
    if cfg.kind in ("bulk", "fqc"):
        ref = float(strain_sq(_xi(datum), dens.scalar_mode))
    else:
        ref = 2.0 if cfg.kind == "jump" else 1.0
    lo, hi = dens.alpha * ref, dens.beta * ref
    viol = []
    if not (lo - tolerance <= estimate <= hi + tolerance):
        viol.append({"what": "estimate", "value": estimate})
    for r in results:
        t = r["task"]
        top = 1.0 if t["role"] == "companion" else ref
        bottom = top
        if t["role"] == "jump":
            # the datum's two flat faces are chords at distance eps from the centre
            bottom = 2.0 * np.sqrt(max(0.0, 1.0 - (t["eps"] / t["rho"]) ** 2))
        v, tol = r["normalized"], r["tolerance"]
        if not (dens.alpha * bottom - tol <= v <= dens.beta * top + tol):
            viol.append({"what": t, "value": v})
    return {"reference": ref, "lower": lo, "upper": hi, "ok": not viol, "violations": viol}


def aggregate_results(cfg: ExperimentConfig, results: list[dict]) -> list[dict]:
    dens = build_density(cfg.family["name"], cfg.family.get("params"), None)
    st_tau = _stencil(cfg.stencil).tau if cfg.kind in ("void", "jump", "gbv") else 0.0
    eps_sorted = sorted(cfg.eps_list, reverse=True)
    out = []
    for k, d in enumerate(cfg.data):
        mine = [r for r in results if r["task"]["datum"] == k]
        entry = {"datum": datum_label(d)}
        if cfg.kind == "void":
            seq = aggregate("void", _cells(results, "void", k, eps_sorted), st_tau)
            entry.update(estimate=seq.estimate, tolerance=seq.tolerance, limit=seq.limit)
        elif cfg.kind == "jump":
            seq = aggregate("jump", _cells(results, "jump", k), st_tau)
            if cfg.companion:
                comp = aggregate("void", _cells(results, "companion", k, eps_sorted), st_tau)
                attach_companion(seq, comp, dens)
                entry.update(companion_2g=2 * comp.estimate, companion_tolerance=2 * comp.tolerance,
                             gap=seq.gap, relative_gap=seq.limit["relative_gap"])
            entry.update(estimate=seq.estimate, tolerance=seq.tolerance, limit=seq.limit)
        elif cfg.kind == "bulk":
            cells = [(r["task"]["rho"], None, SimpleNamespace(normalized=r["normalized"],
                                                               tolerance=r["tolerance"]))
                     for r in mine]
            seq = bulk_sequence(cells)
            entry.update(estimate=seq.estimate, tolerance=seq.tolerance, limit=seq.limit)
        else:
            r = mine[0]
            entry.update(estimate=r["normalized"], tolerance=r["tolerance"],
                         limit={"pointwise": r["diagnostics"].get("pointwise_g"),
                                "cross_check": r["diagnostics"].get("cross_check")})
        entry["max_cell"] = max(r["normalized"] for r in mine if r["task"]["role"] != "companion")
        entry["growth_bounds"] = _growth(cfg, dens, d, entry["estimate"], entry["tolerance"], mine)
        out.append(entry)
    return out


def _csv_text(cfg, results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    rows = []
    for r in results:
        t = r["task"]
        kind = {"companion": "void-companion"}.get(t["role"], t["role"])
        eps_or_r = t["rho"] if t["role"] == "bulk" else t["eps"]
        rho = None if t["role"] == "bulk" else t["rho"]
        rows.append((t["datum"], kind, -(rho or 0), -(eps_or_r or 0),
                     [cfg.scenario, kind, datum_label(cfg.data[t["datum"]]), fmt(rho),
                      fmt(eps_or_r), fmt(t["spacing"]), fmt(r["raw"]), fmt(r["normalized"]),
                      fmt(r["tolerance"]), r["flag"]]))
    for *_, row in sorted(rows, key=lambda z: z[:4]):
        w.writerow(row)
    return buf.getvalue()


def evaluate_expectations(cfg, entries) -> list[dict]:
    checks = []
    for e in cfg.expect:
        v = entries[e["datum"]].get(e["quantity"])
        ok = v is not None
        if ok and "min" in e:
            ok &= v >= e["min"]
        if ok and "max" in e:
            ok &= v <= e["max"]
        if ok and "value" in e:
            ok &= abs(v - e["value"]) <= e["tolerance"]
        checks.append({**e, "observed": v, "passed": bool(ok)})
    return checks


def summarize(cfg: ExperimentConfig, results) -> dict:
    entries = aggregate_results(cfg, results)
    checks = evaluate_expectations(cfg, entries)
    auto = []
    for k, e in enumerate(entries):
        if not e["growth_bounds"]["ok"]:
            auto.append(f"datum {k}: growth bounds violated")
        lim = e.get("limit", {})
        if lim.get("lower_bound_ok") is False:
            auto.append(f"datum {k}: jump density below twice the void density")
    cfg_doc = {k: v for k, v in cfg.to_dict().items() if k not in ("out", "jobs")}
    return {"scenario": cfg.scenario, "kind": cfg.kind, "config": cfg_doc,
            "stencil_tau": _stencil(cfg.stencil).tau if cfg.kind in ("void", "jump", "gbv") else None,
            "results": entries, "expectations": checks, "automatic_failures": auto,
            "passed": all(c["passed"] for c in checks) and not auto}


def run_experiment(cfg: ExperimentConfig, out: str | None = None, jobs: int | None = None,
                   render: bool = True) -> dict:
    """Run every solve of ``cfg`` and write <scenario>.csv/.json (+ .pgm/.svg) to ``out``."""
    results = execute(cfg, jobs)
    summary = summarize(cfg, results)
    out = out if out is not None else cfg.out
    files = {}
    csv_text = _csv_text(cfg, results)
    json_text = json.dumps(rounded(summary), indent=2, sort_keys=True) + "\n"
    files[f"{cfg.scenario}.csv"] = csv_text
    files[f"{cfg.scenario}.json"] = json_text
    if out:
        os.makedirs(out, exist_ok=True)
        for name, text in files.items():
            with open(os.path.join(out, name), "w") as fh:
                fh.write(text)
        if render:
            _write_artifacts(cfg, results, out)
    return {"summary": summary, "csv": csv_text, "json": json_text, "results": results}


def _write_artifacts(cfg, results, out):
    for r in results:
        art = r.get("artifact")
        if art is None:
            continue
        t = r["task"]
        stem = f"{cfg.scenario}_d{t['datum']}"
        title = f"{cfg.scenario} {datum_label(cfg.data[t['datum']])}"
        if art[0] == "labels":
            comment = (f"scenario {cfg.scenario}\nkind {t['role']}\n"
                       f"datum {datum_label(cfg.data[t['datum']])}\nrho {fmt(t['rho'])}\n"
                       f"eps {fmt(t['eps'])}\nspacing {fmt(t['spacing'])}")
            write_pgm(os.path.join(out, stem + ".pgm"), art[1], comment)
            svg = codes_svg(art[1], cell_px=max(1, 512 // art[1].shape[1]), title=title,
                            three_label=t["role"] == "jump")
        else:
            dens = build_density(cfg.family["name"], cfg.family.get("params"), None)
            side = t["rho"] * (dens.period or 1.0)
            mesh = FemMesh(bulk_domain(side / 2, t["spacing"], (0.0, 0.0), SQUARE, cfg.collar_cells))
            svg = deformed_mesh_svg(mesh, art[1], title=title)
        with open(os.path.join(out, stem + ".svg"), "w") as fh:
            fh.write(svg)


def run_suite(cfgs: list[ExperimentConfig], out: str | None = None, jobs: int | None = None,
              render: bool = False) -> dict:
    if not cfgs:
        raise ConfigError("suite lists no scenarios", "/scenarios")
    reports = []
    for cfg in cfgs:
        rep = run_experiment(cfg, out, jobs, render)
        reports.append(rep["summary"])
    failed = [r["scenario"] for r in reports if not r["passed"]]
    combined = {"scenarios": reports, "failed": failed, "passed": not failed}
    if out:
        with open(os.path.join(out, "suite.json"), "w") as fh:
            fh.write(json.dumps(rounded(combined), indent=2, sort_keys=True) + "\n")
    return combined
