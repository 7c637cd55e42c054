"""Envelopes of the relaxed energy: f^qc for convex densities and g^BV by one cell min-cut."""
from __future__ import annotations

import csv

import numpy as np

from voidcell.densities import BulkDensity, DensityError, SurfaceDensity
from voidcell.elastic import bulk_domain, solve_bulk_cell
from voidcell.geometry import DISC, SQUARE, Stencil
from voidcell.surface import cell_domain, default_stencil, solve_void_cell


class UnsupportedDensity(DensityError):
    """General quasiconvexification is not attempted."""


def gbv_envelope(g: SurfaceDensity, x, nu, resolution=64, stencil: Stencil | None = None,
                 collar_cells=2):
    """Least perimeter on B_1 with half-space data, for the density frozen at ``x``.

    ``resolution`` is the number of cells per unit radius.  Returns the
    normalized cell result (value = ``.normalized``).
    """
    stencil = stencil or default_stencil()
    g0 = g.frozen(x)
    dom = cell_domain(1.0, 1.0 / resolution, (0.0, 0.0), DISC, collar_cells)
    res = solve_void_cell(g0, dom, (0.0, 0.0), nu, stencil)
    res.kind = "gbv"
    res.diagnostics["pointwise_g"] = float(g0(np.zeros(2), np.asarray(nu, dtype=float)))
    return res


def fqc_envelope(f: BulkDensity, x, xi, cross_check=False, spacing=1 / 64) -> dict:
    """f^qc(x, xi) for a density convex in the strain, where it equals f(x, xi).

    With ``cross_check`` the frozen density is also minimized on the unit
    square with affine data, which must return the same value.
    """
    if not f.convex_in_xi:
        raise UnsupportedDensity("quasiconvex envelope only evaluated for convex densities")
    xi = np.asarray(xi, dtype=float)
    value = float(f(np.asarray(x, dtype=float), xi))
    out = {"value": value, "cross_check": None}
    if cross_check:
        f0 = f.frozen(x)
        res = solve_bulk_cell(f0, bulk_domain(0.5, spacing, (0.0, 0.0), SQUARE), (0.0, 0.0), xi)
        out["cross_check"] = res.normalized
        out["cross_check_tolerance"] = res.tolerance
    return out


def stencil_directions(stencil: Stencil | None = None) -> np.ndarray:
    """Unit normals perpendicular to the stencil offsets, one per +- pair."""
    stencil = stencil or default_stencil()
    return stencil.normals


def gbv_table(g: SurfaceDensity, x, resolution=64, stencil=None, directions=None):
    """Rows (angle, nu1, nu2, pointwise g, envelope, tolerance) over the stencil normals."""
    stencil = stencil or default_stencil()
    dirs = stencil_directions(stencil) if directions is None else np.asarray(directions, float)
    rows = []
    for nu in dirs:
        res = gbv_envelope(g, x, nu, resolution, stencil)
        rows.append((float(np.arctan2(nu[1], nu[0])), float(nu[0]), float(nu[1]),
                     res.diagnostics["pointwise_g"], res.normalized, res.tolerance))
    return rows


def write_envelope_csv(path, rows, header=("angle", "nu1", "nu2", "g", "envelope", "tolerance")):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in r])
