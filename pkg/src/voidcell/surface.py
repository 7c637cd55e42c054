"""Void cell problem: least anisotropic perimeter of a set agreeing with a half-space near the rim."""
from __future__ import annotations

import numpy as np

from voidcell.geometry import (DISC, IN, OUT, GridDomain, LabelField, Stencil, build_grid,
                               collar_fraction_for, edge_coefficients, halfspace_labels,
                               make_stencil, perimeter_energy)
from voidcell.limits import INNER_EPS, ScaleSeries, double_limit
from voidcell.maxflow import QUANT_SCALE, CutProblem, cut_to_labels, quantize
from voidcell.results import GAMMA1, CellResult, SequenceResult

_DEFAULT_STENCIL = None


def default_stencil() -> Stencil:
    global _DEFAULT_STENCIL
    if _DEFAULT_STENCIL is None:
        _DEFAULT_STENCIL = make_stencil(16)
    return _DEFAULT_STENCIL


def quantized_edges(domain: GridDomain, stencil: Stencil, g):
    """Per offset: (a, b, integer weight) for every neighbouring cell pair."""
    out = []
    for k in range(len(stencil.offsets)):
        a, b = domain.neighbor_pairs(stencil.offsets[k])
        out.append((a, b, quantize(edge_coefficients(domain, stencil, g, k))))
    return out


def free_node_map(frozen):
    node = np.full(len(frozen), -1, dtype=np.int64)
    free = ~np.asarray(frozen)
    node[free] = np.arange(free.sum())
    return node


def _two_label_problem(datum: LabelField, edges):
    frozen = datum.frozen
    node = free_node_map(frozen)
    prob = CutProblem(int((node >= 0).sum()))
    lab = datum.labels
    for a, b, w in edges:
        fa, fb = frozen[a], frozen[b]
        both = ~fa & ~fb
        prob.add_arcs(node[a[both]], node[b[both]], w[both], w[both])
        for free_end, fixed_end, m in ((a, b, ~fa & fb), (b, a, fa & ~fb)):
            src = m & (lab[fixed_end] == IN)
            snk = m & (lab[fixed_end] != IN)
            prob.add_source(node[free_end[src]], w[src])
            prob.add_sink(node[free_end[snk]], w[snk])
        const = fa & fb & (lab[a] != lab[b])
        prob.constant += int(w[const].sum())
    return prob, node


def solve_void_cell(g, domain: GridDomain, x, nu, stencil: Stencil | None = None) -> CellResult:
    """Minimal perimeter of E in the domain with E = {<y - x, nu> <= 0} on the collar.

    The result is a pure function of the surface density: no bulk data enters.
    Normalized by gamma_1 * rho.
    """
    stencil = stencil or default_stencil()
    datum = halfspace_labels(domain, x, nu)
    edges = quantized_edges(domain, stencil, g)
    prob, node = _two_label_problem(datum, edges)
    value, side = prob.solve()
    labels = cut_to_labels(side, node, datum.labels, IN, OUT)
    field = LabelField(domain, labels.astype(np.int8), datum.frozen.copy(), "two")
    raw = value / QUANT_SCALE * domain.spacing
    check = perimeter_energy(field, g, stencil)
    norm = GAMMA1 * domain.rho
    quant_err = 0.5 * sum(len(e[0]) for e in edges) / QUANT_SCALE * domain.spacing
    diag = {"nodes": prob.n, "arcs": prob.arc_count(), "tau_stencil": stencil.tau,
            "stencil": stencil.name, "recomputed_energy": check,
            "quantization_bound": quant_err, "collar_width": domain.collar_width(),
            "spacing": domain.spacing, "rho": domain.rho, "shape": domain.shape}
    if abs(check - raw) > quant_err + 1e-9:
        raise RuntimeError(f"cut value {raw} disagrees with perimeter {check}")
    normalized = raw / norm
    tol = stencil.tau * normalized + quant_err / norm
    return CellResult("void", raw, normalized, norm, "gamma1*rho", tol, diag, labels=field)


def cell_domain(rho, spacing, x=(0.0, 0.0), shape=DISC, collar_cells=2, min_cells_per_rho=16):
    cf = collar_fraction_for(collar_cells, shape, rho, spacing)
    return build_grid(shape, x, rho, spacing, cf, min_cells_per_rho=min_cells_per_rho)


def surface_family(g, periodic=True):
    """eps -> g_eps.  Periodic families oscillate as g(x / eps); fixed ones ignore eps."""
    if periodic:
        return lambda eps: g.rescaled(eps)
    return lambda eps: g


def aggregate(kind, cells, stencil_tau, reference_scale=1.0):
    """Double limit over cells given as (rho, eps, CellResult)."""
    by_rho = {}
    for rho, eps, res in cells:
        by_rho.setdefault(rho, []).append((eps, res.normalized))
    series = {rho: ScaleSeries([e for e, _ in pts], [v for _, v in pts], INNER_EPS)
              for rho, pts in by_rho.items()}
    dl = double_limit(series)
    budget = stencil_tau * abs(dl.estimate) * reference_scale + dl.tolerance
    return SequenceResult(kind, dl.estimate, budget, dl.as_dict(), cells)


def homogenized_surface(g, nu, eps_list, rho_list, x=(0.0, 0.0), cells_per_rho=64,
                        periodic=True, stencil=None, shape=DISC, collar_cells=2, spacing=None) -> SequenceResult:
    """g-hat(x, nu): inner extrapolation over eps, outer over rho."""
    stencil = stencil or default_stencil()
    family = surface_family(g, periodic)
    eps_list = sorted(eps_list, reverse=True)
    if len(eps_list) < 3:
        raise ValueError("need at least three eps values")
    cells = []
    for rho in sorted(rho_list, reverse=True):
        h = spacing or rho / cells_per_rho
        if min(eps_list) < 2 * h * (1 - 1e-12):
            raise ValueError("finest eps not resolved by two cells")
        dom = cell_domain(rho, h, x, shape, collar_cells)
        cached = None
        for eps in eps_list:
            if periodic or cached is None:
                cached = solve_void_cell(family(eps), dom, x, nu, stencil)
            cells.append((rho, eps, cached))
    seq = aggregate("void", cells, stencil.tau)
    seq.limit["bounds_ok"] = bool(g.alpha - seq.tolerance <= seq.estimate <= g.beta + seq.tolerance)
    return seq
