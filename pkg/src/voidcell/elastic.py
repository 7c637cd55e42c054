"""Bulk cell problem for quadratic densities a(y) |e(v)|^2 with affine boundary data.

P1 elements on the two-triangles-per-cell mesh of a GridDomain, one-point
quadrature at triangle barycentres.  Nodes of collar cells carry the datum
l_xi(y) = xi (y - x); the remaining nodes are solved for by preconditioned CG.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, cg

from voidcell.densities import BulkDensity, DensityError
from voidcell.geometry import SQUARE, GridDomain, build_grid, collar_fraction_for
from voidcell.limits import R_GROWTH, ScaleSeries, estimate_limit
from voidcell.results import CellResult, SequenceResult

SQRT2 = np.sqrt(2.0)
CG_RTOL = 1e-10


class SolverError(RuntimeError):
    """Linear solver failed to converge."""


@dataclass(eq=False)
class FemMesh:
    domain: GridDomain
    nodes: np.ndarray = field(init=False, repr=False)          # (n_nodes, 2)
    triangles: np.ndarray = field(init=False, repr=False)      # (n_tri, 3)
    constrained: np.ndarray = field(init=False, repr=False)    # per node
    tri_cell: np.ndarray = field(init=False, repr=False)       # owning cell per triangle

    def __post_init__(self):
        dom = self.domain
        m = dom.half_cells
        i, j = dom.ij[:, 0], dom.ij[:, 1]
        stride = 2 * m + 1
        corner = lambda di, dj: (j + dj + m) * stride + (i + di + m)
        c00, c10, c11, c01 = corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)
        keys, inv = np.unique(np.concatenate([c00, c10, c11, c01]), return_inverse=True)
        n = dom.n_cells
        v00, v10, v11, v01 = (inv[k * n:(k + 1) * n] for k in range(4))
        self.nodes = np.asarray(dom.center) + np.stack(
            [keys % stride - m, keys // stride - m], axis=1) * dom.spacing
        self.triangles = np.concatenate([np.stack([v00, v10, v11], 1),
                                         np.stack([v00, v11, v01], 1)])
        self.tri_cell = np.concatenate([np.arange(n), np.arange(n)])
        con = np.zeros(len(keys), dtype=bool)
        coll = dom.collar
        for v in (v00, v10, v11, v01):
            con[v[coll]] = True
        self.constrained = con

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def barycenters(self) -> np.ndarray:
        return self.nodes[self.triangles].mean(axis=1)

    @cached_property
    def gradients(self) -> np.ndarray:
        """(n_tri, 3, 2) gradients of the three hat functions on each triangle."""
        p = self.nodes[self.triangles]
        J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)    # columns are edges
        Jinv = np.linalg.inv(J)                                          # rows: d(lambda_1,2)/dy
        g12 = Jinv
        g0 = -g12.sum(axis=1, keepdims=True)
        return np.concatenate([g0, g12], axis=1)

    def strain_operator(self, scalar_mode: bool) -> sp.csr_matrix:
        """Per-triangle strain vectors from nodal values.

        Vector mode: rows (e11, e22, sqrt2 e12) with dofs 2 * node + component,
        so that |row block|^2 = |sym grad u|^2.  Scalar mode: the gradient.
        """
        nt = len(self.triangles)
        G = self.gradients
        tri = self.triangles
        rows, cols, vals = [], [], []
        t = np.arange(nt)
        for k in range(3):
            gx, gy, node = G[:, k, 0], G[:, k, 1], tri[:, k]
            if scalar_mode:
                rows += [2 * t, 2 * t + 1]
                cols += [node, node]
                vals += [gx, gy]
            else:
                rows += [3 * t, 3 * t + 1, 3 * t + 2, 3 * t + 2]
                cols += [2 * node, 2 * node + 1, 2 * node, 2 * node + 1]
                vals += [gx, gy, gy / SQRT2, gx / SQRT2]
        nrow = (2 if scalar_mode else 3) * nt
        ncol = (1 if scalar_mode else 2) * self.n_nodes
        return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(nrow, ncol))


def affine_datum(mesh: FemMesh, x, xi, scalar_mode: bool) -> np.ndarray:
    y = mesh.nodes - np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if scalar_mode:
        return y @ xi[-1]
    return (y @ xi.T).ravel()


def _check_quadratic(f: BulkDensity):
    if f.coefficient is None:
        raise DensityError("only the quadratic family a(y) |e|^2 is solved")
    if not f.convex_in_xi:
        raise DensityError("density not convex in the strain")


def solve_bulk_cell(f: BulkDensity, domain: GridDomain, x, xi, mesh: FemMesh | None = None,
                    datum_shift=0.0) -> CellResult:
    """min of sum_T a(b_T) |e(v)|^2 |T| over P1 fields equal to l_xi on collar nodes.

    Normalized by the square's area, or by the discrete area of the disc
    (the lattice cells actually present).  ``datum_shift`` adds a constant to
    the datum, which must not change anything.
    """
    _check_quadratic(f)
    mesh = mesh or FemMesh(domain)
    scalar = f.scalar_mode
    comps = 1 if scalar else 2
    B = mesh.strain_operator(scalar)
    a = np.asarray(f.coefficient(mesh.barycenters), dtype=float)
    w = np.repeat(a * mesh.areas, 2 if scalar else 3)
    K = (B.T @ sp.diags(w) @ B).tocsr()
    u0 = affine_datum(mesh, x, xi, scalar) + datum_shift
    fixed = np.repeat(mesh.constrained, comps)
    free = ~fixed
    u = u0.copy()
    info, iters = 0, 0
    if free.any():
        Kff = K[free][:, free]
        rhs = -(K[free][:, fixed] @ u0[fixed])
        dinv = 1.0 / Kff.diagonal()
        M = LinearOperator(Kff.shape, matvec=lambda r: dinv * r)
        maxiter = int(50 * np.sqrt(free.sum())) + 10
        count = [0]

        def cb(_):
            count[0] += 1
        bn = np.linalg.norm(rhs)
        if bn == 0.0:
            sol = np.zeros(free.sum())
        else:
            sol, info = cg(Kff, rhs, x0=u0[free], rtol=CG_RTOL, atol=0.0, maxiter=maxiter,
                           M=M, callback=cb)
            if info != 0:
                raise SolverError(f"CG did not converge in {maxiter} iterations")
        iters = count[0]
        u[free] = sol
    raw = float(u @ (K @ u))
    affine = float(u0 @ (K @ u0))
    norm = domain.area
    label = "area" if domain.shape == SQUARE else "discrete disc area"
    normalized = raw / norm
    diag = {"dof": int(free.sum()), "cg_iterations": iters, "affine_energy": affine,
            "spacing": domain.spacing, "rho": domain.rho, "shape": domain.shape,
            "collar_width": domain.collar_width(), "gamma2_rho2": float(np.pi * domain.rho**2)}
    tol = 1e-9 * max(1.0, abs(normalized))
    field_ = u.reshape(-1, comps) if not scalar else u
    return CellResult("bulk", raw, normalized, norm, label, tol, diag, field=field_)


def bulk_domain(half_side, spacing, x=(0.0, 0.0), shape=SQUARE, collar_cells=1):
    cf = collar_fraction_for(collar_cells, shape, half_side, spacing)
    return build_grid(shape, x, half_side, spacing, cf)


def homogenized_bulk(f: BulkDensity, xi, r_list=(4, 8, 16), cells_per_period=16,
                     collar_cells=1) -> SequenceResult:
    """f_hom(xi) from the cubes Q_r of side r (in periods) centred at the origin.

    Each value m(l_xi, Q_r) / r^2 is extrapolated in 1 / r.
    """
    _check_quadratic(f)
    period = f.period or 1.0
    r_list = sorted(r_list)
    if len(r_list) < 3:
        raise ValueError("need at least three cube sizes")
    cells = []
    for r in r_list:
        side = r * period
        dom = bulk_domain(side / 2, period / cells_per_period, (0.0, 0.0), SQUARE, collar_cells)
        cells.append((r, None, solve_bulk_cell(f, dom, (0.0, 0.0), xi)))
    return bulk_sequence(cells)


def bulk_sequence(cells) -> SequenceResult:
    """Extrapolate (r, _, CellResult) values in 1 / r."""
    cells = sorted(cells, key=lambda c: c[0])
    series = ScaleSeries([1.0 / r for r, _, _ in cells], [c.normalized for _, _, c in cells],
                         R_GROWTH)
    est = estimate_limit(series)
    limit = est.as_dict()
    limit["solver_tolerance"] = max(c.tolerance for _, _, c in cells)
    return SequenceResult("bulk", est.estimate, est.spread + limit["solver_tolerance"], limit, cells)


def write_vtk(path, mesh: FemMesh, displacement) -> None:
    """Legacy ASCII VTK unstructured grid with the nodal displacement."""
    u = np.asarray(displacement, dtype=float)
    vec = u.reshape(mesh.n_nodes, -1)
    if vec.shape[1] == 1:
        vec = np.concatenate([np.zeros((mesh.n_nodes, 2)), vec], axis=1)
    else:
        vec = np.concatenate([vec, np.zeros((mesh.n_nodes, 1))], axis=1)
    nt = len(mesh.triangles)
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\nbulk cell displacement\nASCII\n")
        fh.write(f"DATASET UNSTRUCTURED_GRID\nPOINTS {mesh.n_nodes} double\n")
        for p in mesh.nodes:
            fh.write(f"{p[0]:.12g} {p[1]:.12g} 0\n")
        fh.write(f"CELLS {nt} {4 * nt}\n")
        for t in mesh.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")
        fh.write(f"CELL_TYPES {nt}\n" + "5\n" * nt)
        fh.write(f"POINT_DATA {mesh.n_nodes}\nVECTORS displacement double\n")
        for v in vec:
            fh.write(f"{v[0]:.12g} {v[1]:.12g} {v[2]:.12g}\n")
