"""Jump cell problem: a void that separates two solid phases with thin-layer boundary data.

The only admissible displacement is u = e1 * 1_{S+}, which is piecewise
constant, so e(u) = 0 and by f(x, 0) = 0 the bulk term vanishes.  The objective
is the perimeter of the void alone, and no jump amplitude or bulk density
enters the computation.

Labels are ordered SOLID_MINUS < VOID < SOLID_PLUS.  The pair cost is
w * phi(|l_p - l_q|) with phi = (0, 1, inf), which is convex in the label
difference, so the layered (Ishikawa) construction with two binary layers
b1 = [l >= VOID], b2 = [l >= SOLID_PLUS] gives the exact minimum over all
three-label fields.  An alpha-expansion pass started from that optimum is run
as an independent check.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from voidcell.geometry import (DISC, SOLID_MINUS, SOLID_PLUS, VOID, GridDomain, LabelField,
                               large_penalty, perimeter_energy, thinlayer_labels)
from voidcell.maxflow import MAX_CAPACITY, QUANT_SCALE, CutProblem
from voidcell.results import GAMMA1, CellResult, SequenceResult
from voidcell.surface import (aggregate, cell_domain, default_stencil, free_node_map,
                              quantized_edges, solve_void_cell, surface_family)


class InfeasibleDatum(RuntimeError):
    """Boundary data with a direct SOLID_PLUS/SOLID_MINUS contact."""


def _layered_problem(datum: LabelField, edges, big: int):
    frozen = datum.frozen
    node = free_node_map(frozen)
    nf = int((node >= 0).sum())
    prob = CutProblem(2 * nf)
    lab = datum.labels.astype(np.int64)
    B1 = lab >= VOID
    B2 = lab >= SOLID_PLUS
    idx = np.arange(nf)
    # b2 <= b1 inside every free cell
    prob.add_arcs(nf + idx, idx, big)
    for a, b, w in edges:
        fa, fb = frozen[a], frozen[b]
        both = ~fa & ~fb
        na, nb = node[a[both]], node[b[both]]
        ww = w[both]
        prob.add_arcs(na, nb, ww, ww)
        prob.add_arcs(nf + na, nf + nb, ww, ww)
        prob.add_arcs(nf + na, nb, big)          # forbid a PLUS next to b MINUS
        prob.add_arcs(nf + nb, na, big)          # forbid b PLUS next to a MINUS
        for p, q, m in ((a, b, ~fa & fb), (b, a, fa & ~fb)):
            p, q, wm = p[m], q[m], w[m]
            n1 = node[p]
            n2 = nf + node[p]
            for layer_node, fixed in ((n1, B1[q]), (n2, B2[q])):
                prob.add_source(layer_node[fixed], wm[fixed])
                prob.add_sink(layer_node[~fixed], wm[~fixed])
            low = ~B1[q]                          # neighbour is MINUS: p may not be PLUS
            prob.add_sink(n2[low], np.full(low.sum(), big))
            high = B2[q]                          # neighbour is PLUS: p may not be MINUS
            prob.add_source(n1[high], np.full(high.sum(), big))
        fixed_pair = fa & fb
        if np.any(np.abs(lab[a[fixed_pair]] - lab[b[fixed_pair]]) == 2):
            raise InfeasibleDatum("collar data put SOLID_PLUS next to SOLID_MINUS")
        d = np.abs(lab[a[fixed_pair]] - lab[b[fixed_pair]])
        prob.constant += int((w[fixed_pair] * d).sum())
    return prob, node, nf


def _pair_cost(la, lb, w, big):
    d = np.abs(la - lb)
    return np.where(d == 2, big, np.where(d == 1, w, 0))


def _labels_energy(lab, edges, big):
    tot = 0
    for a, b, w in edges:
        tot += int(_pair_cost(lab[a], lab[b], w, big).sum())
    return tot


def _expansion_move(lab, frozen, edges, alpha, big):
    """One alpha-expansion; returns the new labels and their quantized energy."""
    node = free_node_map(frozen)
    n = int((node >= 0).sum())
    prob = CutProblem(n)
    # variable y = 1 (switch to alpha) <=> sink side
    for a, b, w in edges:
        la, lb = lab[a].astype(np.int64), lab[b].astype(np.int64)
        fa, fb = frozen[a], frozen[b]
        A = _pair_cost(la, lb, w, big)
        both = ~fa & ~fb
        Bc = _pair_cost(la, np.full_like(lb, alpha), w, big)    # a keeps, b switches
        Cc = _pair_cost(np.full_like(la, alpha), lb, w, big)    # a switches, b keeps
        if both.any():
            An, Bn, Cn = A[both], Bc[both], Cc[both]
            na, nb = node[a[both]], node[b[both]]
            lam = Bn + Cn - An
            if np.any(lam < 0):
                raise RuntimeError("non-submodular expansion move")
            prob.constant += int(An.sum())
            _unary(prob, na, Cn - An)
            _unary(prob, nb, -Cn)
            prob.add_arcs(na, nb, lam)
        for p, m, keep, switch in ((a, ~fa & fb, A, Cc), (b, fa & ~fb, A, Bc)):
            if not m.any():
                continue
            prob.constant += int(keep[m].sum())
            _unary(prob, node[p[m]], switch[m] - keep[m])
        fixed = fa & fb
        prob.constant += int(A[fixed].sum())
    value, side = prob.solve()
    new = lab.copy()
    free = node >= 0
    switch = ~side[node[free]]
    idx = np.nonzero(free)[0][switch]
    new[idx] = alpha
    return new, value


def _unary(prob, nodes, delta):
    """Add cost ``delta`` for y = 1 (sink side) on ``nodes``; delta may be negative."""
    pos = delta > 0
    prob.add_source(nodes[pos], delta[pos])
    neg = delta < 0
    prob.add_sink(nodes[neg], -delta[neg])
    prob.constant += int(delta[neg].sum())


def separation_audit(field: LabelField, stencil) -> dict:
    """No PLUS/MINUS contact, and every solid component reaches its own collar arc."""
    dom = field.domain
    lab = field.labels
    contact = 0
    for o in stencil.offsets:
        a, b = dom.neighbor_pairs(o)
        contact += int(np.sum(np.abs(lab[a].astype(int) - lab[b]) == 2))
    ok_components = True
    for phase in (SOLID_PLUS, SOLID_MINUS):
        img = dom.raster((lab == phase).astype(np.int8), fill=0)
        anchors = dom.raster(((lab == phase) & field.frozen).astype(np.int8), fill=0)
        comp, ncomp = ndimage.label(img, structure=np.ones((3, 3)))
        for c in range(1, ncomp + 1):
            if not anchors[comp == c].any():
                ok_components = False
    return {"contacts": contact, "components_anchored": ok_components,
            "separated": contact == 0 and ok_components}


def solve_jump_cell(g, domain: GridDomain, x, nu, eps=None, stencil=None,
                    expansion=True) -> CellResult:
    """Minimal void perimeter over fields matching the thin-layer datum on the collar.

    ``eps`` is the layer half-width (default four lattice spacings).  Normalized
    by gamma_1 * rho.  The result carries the displacement u = e1 * 1_{S+}.
    """
    stencil = stencil or default_stencil()
    if eps is None:
        eps = 4 * domain.spacing
    datum = thinlayer_labels(domain, x, nu, eps)
    edges = quantized_edges(domain, stencil, g)
    big = int(min(round(large_penalty(g, domain.rho, domain.spacing) * QUANT_SCALE), MAX_CAPACITY))
    prob, node, nf = _layered_problem(datum, edges, big)
    value, side = prob.solve()
    if value >= big:
        raise InfeasibleDatum("no separating void exists for this datum")
    lab = datum.labels.astype(np.int64).copy()
    free = node >= 0
    b1 = side[node[free]]
    b2 = side[nf + node[free]]
    lab[free] = b1.astype(np.int64) + b2.astype(np.int64)
    layered_value = _labels_energy(lab, edges, big)
    if layered_value != value:
        raise RuntimeError(f"layered cut {value} does not match its labeling {layered_value}")

    winner = "layered"
    exp_value = None
    if expansion:
        cur, cur_val = lab, value
        improved = True
        while improved:
            improved = False
            for alpha in (VOID, SOLID_MINUS, SOLID_PLUS):
                # any contact already costs more than the incumbent, which keeps sums in range
                new, val = _expansion_move(cur, datum.frozen, edges, alpha, cur_val + 1)
                if val < cur_val:
                    cur, cur_val, improved = new, val, True
        exp_value = cur_val
        if cur_val < value:
            lab, value, winner = cur, cur_val, "expansion"

    field = LabelField(domain, lab.astype(np.int8), datum.frozen.copy(), "three")
    raw = value / QUANT_SCALE * domain.spacing
    check = perimeter_energy(field, g, stencil)
    audit = separation_audit(field, stencil)
    quant_err = 0.5 * sum(len(e[0]) for e in edges) / QUANT_SCALE * domain.spacing
    if abs(check - raw) > quant_err + 1e-9:
        raise RuntimeError(f"cut value {raw} disagrees with perimeter {check}")
    norm = GAMMA1 * domain.rho
    disp = np.zeros((domain.n_cells, 2))
    disp[lab == SOLID_PLUS, 0] = 1.0
    diag = {"nodes": prob.n, "arcs": prob.arc_count(), "tau_stencil": stencil.tau,
            "stencil": stencil.name, "eps": eps, "optimizer": winner,
            "layered_energy": layered_value / QUANT_SCALE * domain.spacing,
            "expansion_energy": None if exp_value is None else exp_value / QUANT_SCALE * domain.spacing,
            "recomputed_energy": check, "quantization_bound": quant_err,
            "collar_width": domain.collar_width(), "spacing": domain.spacing,
            "rho": domain.rho, "shape": domain.shape, **audit}
    if not audit["separated"]:
        raise RuntimeError("returned labels fail the separation audit")
    normalized = raw / norm
    tol = stencil.tau * normalized + quant_err / norm
    return CellResult("jump", raw, normalized, norm, "gamma1*rho", tol, diag, labels=field,
                      field=disp)


def solve_jump_sequence(g, x, nu, rho_list, eps_list, cells_per_rho=64, periodic=True,
                        stencil=None, shape=DISC, collar_cells=2, spacing=None,
                        with_companion=True) -> SequenceResult:
    """h-hat(x, nu) with the companion g-hat computed on the same grids.

    The thin-layer half-width equals eps, the same parameter that drives the
    density family.
    """
    stencil = stencil or default_stencil()
    family = surface_family(g, periodic)
    eps_list = sorted(eps_list, reverse=True)
    if len(eps_list) < 3:
        raise ValueError("need at least three eps values")
    jump_cells, void_cells = [], []
    for rho in sorted(rho_list, reverse=True):
        h = spacing or rho / cells_per_rho
        if min(eps_list) < 2 * h * (1 - 1e-12):
            raise ValueError("finest eps not resolved by two cells")
        dom = cell_domain(rho, h, x, shape, collar_cells)
        void_cached = None
        for eps in eps_list:
            ge = family(eps)
            jump_cells.append((rho, eps, solve_jump_cell(ge, dom, x, nu, eps, stencil)))
            if with_companion:
                if periodic or void_cached is None:
                    void_cached = solve_void_cell(ge, dom, x, nu, stencil)
                void_cells.append((rho, eps, void_cached))
    seq = aggregate("jump", jump_cells, stencil.tau)
    if with_companion:
        attach_companion(seq, aggregate("void", void_cells, stencil.tau), g)
    return seq


def attach_companion(seq: SequenceResult, companion: SequenceResult, g) -> SequenceResult:
    """Record 2 g-hat next to h-hat together with the gap and the two checks on it.

    The lower bound h-hat >= 2 g-hat holds for every density; equality is only
    expected when g is continuous in x.
    """
    seq.companion = companion
    budget = seq.tolerance + 2 * companion.tolerance
    seq.limit["continuous_in_x"] = bool(g.continuous_in_x)
    seq.limit["gap"] = seq.gap
    seq.limit["relative_gap"] = seq.gap / (2 * companion.estimate)
    seq.limit["gap_budget"] = budget
    seq.limit["lower_bound_ok"] = bool(seq.gap >= -budget)
    seq.limit["identity_ok"] = bool(abs(seq.gap) <= budget) if g.continuous_in_x else None
    return seq
