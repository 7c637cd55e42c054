"""Brute-force and closed-form reference solutions.

Nothing here imports the solver modules; the oracles only share plain data
(arrays, callables) with the code they check.
"""
from __future__ import annotations

import numpy as np


def brute_force_mincut(node_count, source, sink, arcs) -> float:
    """Minimum s-t cut capacity by enumerating every source-side set.

    ``arcs`` are ``(from, to, capacity)`` triples.  Limited to 12 nodes.
    """
    if node_count > 12:
        raise ValueError("brute force limited to 12 nodes")
    others = [i for i in range(node_count) if i not in (source, sink)]
    arcs = list(arcs)
    if not arcs:
        return 0
    # one row per subset of the inner nodes: side[k, v] = v on the source side
    bits = (np.arange(1 << len(others))[:, None] >> np.arange(len(others))) & 1
    side = np.zeros((len(bits), node_count), dtype=bool)
    side[:, source] = True
    side[:, others] = bits.astype(bool)
    u, v, c = (np.array(col) for col in zip(*arcs))
    cut = (side[:, u] & ~side[:, v]) @ c.astype(np.int64)
    return int(cut.min())


def laminate_1d(a_profile, slope=1.0, length=1.0) -> float:
    """Minimal normalized energy of int a(t) v'(t)^2 dt with v(L) - v(0) = slope * L.

    ``a_profile`` is sampled on a uniform partition of [0, L].  The Euler-Lagrange
    equation (a v')' = 0 gives a v' = const, so v' = c / a with c fixed by the
    boundary values; the energy per unit length is slope^2 * harmonic mean of a.
    """
    a = np.asarray(a_profile, dtype=float)
    if np.any(a <= 0):
        raise ValueError("coefficients must be positive")
    dt = length / a.size
    inv = np.sum(dt / a)
    c = slope * length / inv
    v_prime = c / a
    energy = np.sum(a * v_prime**2 * dt)
    return float(energy / length)


def _monotone_configs(n_rows, lo, hi, three_label):
    """Column configurations: one cut height (two labels) or two (three labels)."""
    if not three_label:
        return [(k,) for k in range(lo, hi + 1)]
    return [(a, b) for a in range(lo, hi + 1) for b in range(a, hi + 1)]


def _column_labels(conf, n_rows, three_label):
    rows = np.arange(n_rows)
    if not three_label:
        return np.where(rows < conf[0], 1, 0)          # 1 = IN below the cut
    a, b = conf
    return np.where(rows < a, 0, np.where(rows < b, 1, 2))  # MINUS / VOID / PLUS


def brute_force_monotone_cut(n, spacing, offsets, weights, g, *, three_label=False,
                             datum_rows=None, collar=2, forbid=1e12):
    """Exact optimum over column-monotone label fields on an n x n square.

    Rows run along the datum normal e2 and columns along e1.  Two-label fields
    are IN below a per-column height; three-label fields are MINUS / VOID / PLUS
    bottom to top.  ``datum_rows`` gives the collar configuration (one height,
    or two for three labels); the outer ``collar`` columns are pinned to it and
    every column keeps its outer ``collar`` rows at the datum labels.

    ``offsets``/``weights`` describe the lattice stencil (one entry per +/- pair)
    and ``g(points)`` the surface density at edge midpoints, which must not
    depend on the normal.  Cells are centred at ((i + 1/2) h - n h / 2, ...).
    Dynamic programming runs over the last ``reach`` columns.
    """
    offsets = [tuple(int(v) for v in o) for o in offsets]
    weights = list(weights)
    reach = max(abs(o[0]) for o in offsets)
    if datum_rows is None:
        datum_rows = (n // 2,) if not three_label else (n // 2 - 2, n // 2 + 2)
    lo, hi = collar, n - collar
    confs = _monotone_configs(n, lo, hi, three_label)
    labs = np.array([_column_labels(c, n, three_label) for c in confs])  # (C, n)
    datum_idx = confs.index(tuple(datum_rows))
    C = len(confs)

    def centre(col, row):
        col, row = np.broadcast_arrays(np.asarray(col, dtype=float), np.asarray(row, dtype=float))
        return np.stack([(col + 0.5) * spacing - n * spacing / 2,
                         (row + 0.5) * spacing - n * spacing / 2], axis=-1)

    def pair_cost(la, lb):
        diff = la != lb
        if three_label:
            return np.where(np.abs(la - lb) == 2, forbid, diff.astype(float))
        return diff.astype(float)

    rows = np.arange(n)

    def column_internal(col):
        cost = np.zeros(C)
        for (dx, dy), w in zip(offsets, weights):
            if dx != 0:
                continue
            r0 = rows[(rows + dy >= 0) & (rows + dy < n)]
            gm = g(centre(col, r0 + dy / 2))
            cost += w * (pair_cost(labs[:, r0], labs[:, r0 + dy]) * gm).sum(axis=1)
        return cost

    def cross(col, dist):
        """Cost between column col and col + dist, shape (C, C)."""
        cost = np.zeros((C, C))
        for (dx, dy), w in zip(offsets, weights):
            for sx, sy in ((dx, dy), (-dx, -dy)):
                if sx != dist:
                    continue
                r0 = rows[(rows + sy >= 0) & (rows + sy < n)]
                gm = g(centre(col + sx / 2, r0 + sy / 2))
                la = labs[:, r0][:, None, :]
                lb = labs[:, r0 + sy][None, :, :]
                cost += w * (pair_cost(la, lb) * gm).sum(axis=2)
        return cost

    allowed = np.zeros((n, C), dtype=bool)
    for col in range(n):
        if col < collar or col >= n - collar:
            allowed[col, datum_idx] = True
        else:
            allowed[col, :] = True
    unary = np.array([np.where(allowed[c], column_internal(c), np.inf) for c in range(n)])

    if reach == 1:
        V = unary[0].copy()
        for col in range(1, n):
            V = np.min(V[:, None] + cross(col - 1, 1), axis=0) + unary[col]
        return float(V.min()) * spacing
    if reach != 2:
        raise ValueError("stencil reach must be 1 or 2")
    # V[a, b]: best energy with columns (col-1, col) = (a, b)
    V = unary[0][:, None] + cross(0, 1) + unary[1][None, :]
    for col in range(2, n):
        c1 = cross(col - 1, 1)
        c2 = cross(col - 2, 2)
        # new[b, c] = min_a V[a, b] + c2[a, c] + c1[b, c] + unary[c]
        best = np.full((C, C), np.inf)
        for a in range(C):
            if not np.isfinite(V[a]).any():
                continue
            cand = V[a][:, None] + c2[a][None, :]
            np.minimum(best, cand, out=best)
        V = best + c1 + unary[col][None, :]
    return float(V.min()) * spacing
