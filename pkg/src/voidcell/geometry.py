"""Raster cell domains, boundary-datum labelings and the discrete anisotropic perimeter.

Cells sit on the lattice ``center + (i + 1/2, j + 1/2) * spacing``; a disc keeps
the cells whose centre lies inside the open ball, a square the cells inside the
open cube of half-side ``rho``.  Perimeters are sums over unordered pairs of
cells joined by a stencil offset; each pair carries a weight that depends on the
surface density at the pair midpoint.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

DISC = "disc"
SQUARE = "square"


# two-label codes
OUT, IN = 0, 1
# three-label codes; the order matters for the layered min-cut construction
SOLID_MINUS, VOID, SOLID_PLUS = 0, 1, 2


class ResolutionError(ValueError):
    """Grid too coarse for the requested problem."""


class CalibrationError(ValueError):
    """Stencil used before calibration."""


@dataclass(frozen=True, eq=False)
class GridDomain:
    shape: str
    center: tuple
    rho: float
    spacing: float
    collar_fraction: float
    half_cells: int = field(init=False)
    ij: np.ndarray = field(init=False, repr=False)
    centers: np.ndarray = field(init=False, repr=False)
    collar: np.ndarray = field(init=False, repr=False)
    index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h, rho = self.spacing, self.rho
        m = int(np.ceil(rho / h - 1e-9))
        k = np.arange(-m, m)
        jj, ii = np.meshgrid(k, k, indexing="ij")     # row-major: y outer, x inner
        ij = np.stack([ii.ravel(), jj.ravel()], axis=1)
        rel = (ij + 0.5) * h
        if self.shape == DISC:
            r = np.hypot(rel[:, 0], rel[:, 1])
            inside = r < rho
            collar = r > (1.0 - self.collar_fraction) * rho
        else:
            d = np.abs(rel).max(axis=1)
            inside = d < rho
            collar = d > rho - self.collar_fraction * 2 * rho
        ij = ij[inside]
        index = np.full((2 * m, 2 * m), -1, dtype=np.int64)
        index[ij[:, 1] + m, ij[:, 0] + m] = np.arange(len(ij))
        object.__setattr__(self, "half_cells", m)
        object.__setattr__(self, "ij", ij)
        object.__setattr__(self, "centers", np.asarray(self.center, dtype=float) + (ij + 0.5) * h)
        object.__setattr__(self, "collar", collar[inside])
        object.__setattr__(self, "index", index)

    @property
    def n_cells(self) -> int:
        return len(self.ij)

    @property
    def cell_area(self) -> float:
        return self.spacing**2

    @property
    def area(self) -> float:
        return self.n_cells * self.spacing**2

    def collar_width(self) -> float:
        side = 2 * self.rho if self.shape == SQUARE else self.rho
        return self.collar_fraction * side

    def neighbor_pairs(self, offset):
        """Index arrays (a, b) of cells with ij[b] = ij[a] + offset, both in the domain."""
        cache = self.__dict__.setdefault("_pairs", {})
        key = tuple(int(v) for v in offset)
        if key not in cache:
            m = self.half_cells
            tgt = self.ij + np.asarray(key)
            ok = (tgt >= -m).all(axis=1) & (tgt < m).all(axis=1)
            b = np.full(len(tgt), -1, dtype=np.int64)
            b[ok] = self.index[tgt[ok, 1] + m, tgt[ok, 0] + m]
            a = np.nonzero(b >= 0)[0]
            cache[key] = (a, b[a])
        return cache[key]

    def raster(self, values, fill=-1):
        """Per-cell values scattered to the (2m, 2m) bounding raster, row 0 at the bottom."""
        m = self.half_cells
        out = np.full((2 * m, 2 * m), fill, dtype=np.asarray(values).dtype)
        out[self.ij[:, 1] + m, self.ij[:, 0] + m] = values
        return out


def build_grid(shape, center, rho, spacing, collar_fraction=0.1, min_cells_per_rho=16) -> GridDomain:
    """Enumerate the cells of a disc or square (``rho`` = radius or half-side)."""
    if shape not in (DISC, SQUARE):
        raise ValueError(f"unknown domain shape {shape!r}")
    if not rho > 0 or not spacing > 0:
        raise ResolutionError("rho and spacing must be positive")
    if spacing > rho / min_cells_per_rho * (1 + 1e-12):
        raise ResolutionError(f"spacing {spacing:g} coarser than rho/{min_cells_per_rho}")
    if not 0 < collar_fraction < 0.5:
        raise ValueError("collar_fraction must lie in (0, 0.5)")
    dom = GridDomain(shape, tuple(float(c) for c in center), float(rho), float(spacing),
                     float(collar_fraction))
    if not dom.collar.any() or dom.collar.all():
        raise ResolutionError("collar band empty or covering the whole domain")
    return dom


def collar_fraction_for(cells, shape, rho, spacing) -> float:
    """collar_fraction giving a collar ``cells`` lattice spacings wide."""
    side = 2 * rho if shape == SQUARE else rho
    return cells * spacing / side


@dataclass
class LabelField:
    domain: GridDomain
    labels: np.ndarray
    frozen: np.ndarray
    mode: str = "two"           # "two": OUT/IN, "three": SOLID_MINUS/VOID/SOLID_PLUS

    def copy(self) -> "LabelField":
        return LabelField(self.domain, self.labels.copy(), self.frozen.copy(), self.mode)


def _signed_distance(domain, x, nu):
    nu = np.asarray(nu, dtype=float)
    if not np.isclose(np.linalg.norm(nu), 1.0, atol=1e-12):
        raise ValueError("nu must be a unit vector")
    d = (domain.centers - np.asarray(x, dtype=float)) @ nu
    d[np.abs(d) < 1e-12 * domain.spacing] = 0.0
    return d


def halfspace_labels(domain: GridDomain, x, nu) -> LabelField:
    """IN on the closed half-space <y - x, nu> <= 0, OUT elsewhere; collar frozen."""
    d = _signed_distance(domain, x, nu)
    labels = np.where(d <= 0, IN, OUT).astype(np.int8)
    return LabelField(domain, labels, domain.collar.copy(), "two")


def thinlayer_labels(domain: GridDomain, x, nu, eps) -> LabelField:
    """VOID on the slab |<y - x, nu>| < eps, SOLID_PLUS / SOLID_MINUS on either side."""
    if eps < 2 * domain.spacing * (1 - 1e-12):
        raise ResolutionError("layer half-width must span at least two cells")
    d = _signed_distance(domain, x, nu)
    labels = np.where(d >= eps, SOLID_PLUS,
                      np.where(d <= -eps, SOLID_MINUS, VOID)).astype(np.int8)
    return LabelField(domain, labels, domain.collar.copy(), "three")


# --- stencils ---------------------------------------------------------------

_OFFSETS = {
    4: [(1, 0), (0, 1)],
    8: [(1, 0), (1, 1), (0, 1), (-1, 1)],
    16: [(1, 0), (2, 1), (1, 1), (1, 2), (0, 1), (-1, 2), (-1, 1), (-2, 1)],
}


@dataclass(frozen=True, eq=False)
class Stencil:
    """One offset per +/- pair and the matching isotropic edge weights.

    ``normals[k]`` is the unit normal perpendicular to ``offsets[k]``; the
    discrete cut cost per unit length of a straight interface with normal nu is
    ``sum_k c_k |<nu, offsets[k]>|``.  Weights are chosen so that this cost
    interpolates the density exactly at every stencil normal (Cauchy-Crofton
    type weights, exact on axis directions).
    """

    offsets: np.ndarray
    weights: np.ndarray
    tau: float | None = None
    name: str = "custom"

    @cached_property
    def normals(self) -> np.ndarray:
        o = self.offsets.astype(float)
        nrm = np.stack([-o[:, 1], o[:, 0]], axis=1)
        return nrm / np.linalg.norm(nrm, axis=1, keepdims=True)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.abs(self.normals @ self.offsets.T.astype(float))

    def line_cost(self, nu, coeffs=None) -> np.ndarray:
        """Cut cost per unit length of straight interfaces with normals ``nu``."""
        c = self.weights if coeffs is None else coeffs
        return np.abs(np.asarray(nu, dtype=float) @ self.offsets.T.astype(float)) @ c

    def coefficients(self, gvals) -> np.ndarray:
        """Edge coefficients reproducing density samples at the stencil normals.

        ``gvals`` has shape (n, K).  When the exact interpolant needs a negative
        coefficient (density not convex in the normal) the largest nonnegative
        interpolant lying below the samples is used instead.
        """
        gvals = np.atleast_2d(gvals)
        c = np.linalg.solve(self.matrix, gvals.T).T
        bad = np.nonzero((c < -1e-12).any(axis=1))[0]
        if len(bad):
            cache = {}
            for r in bad:
                key = gvals[r].tobytes()
                if key not in cache:
                    cache[key] = _lower_zonoid(self.matrix, gvals[r])
                c[r] = cache[key]
        return np.maximum(c, 0.0)


def _lower_zonoid(A, g):
    """max sum(A c) s.t. A c <= g, c >= 0."""
    res = linprog(-A.sum(axis=0), A_ub=A, b_ub=g, bounds=[(0, None)] * A.shape[1],
                  method="highs")
    if not res.success:
        raise RuntimeError(f"edge-weight projection failed: {res.message}")
    return res.x


def make_stencil(size=16) -> Stencil:
    """4-, 8- or 16-neighbourhood with calibrated weights."""
    if size not in _OFFSETS:
        raise ValueError("stencil size must be 4, 8 or 16")
    offsets = np.array(_OFFSETS[size], dtype=np.int64)
    raw = Stencil(offsets, np.zeros(len(offsets)), name=f"n{size}")
    weights = np.linalg.solve(raw.matrix, np.ones(len(offsets)))
    st = Stencil(offsets, weights, name=f"n{size}")
    return Stencil(offsets, weights, tau=stencil_calibration(st), name=f"n{size}")


def calibration_directions(n=180):
    th = np.arange(n) * np.pi / n
    return np.stack([np.cos(th), np.sin(th)], axis=1)


def stencil_calibration(stencil: Stencil, directions=None) -> float:
    """Max relative error of discrete vs true length over straight cuts (g = 1).

    The discrete length per unit length of a straight cut is the lattice line
    density ``sum_k w_k |<nu, o_k>|``; the default direction set is a fine
    angular sweep that contains the axis and diagonal directions.
    """
    if directions is None:
        directions = calibration_directions()
    nus = np.asarray(directions, dtype=float)
    if len(nus) < 8:
        raise ValueError("need at least 8 calibration directions")
    nus = nus / np.linalg.norm(nus, axis=1, keepdims=True)
    return float(np.max(np.abs(stencil.line_cost(nus) - 1.0)))


# --- perimeter ----------------------------------------------------------------

def edge_coefficients(domain: GridDomain, stencil: Stencil, g, k: int) -> np.ndarray:
    """Dimensionless weights of the edges for offset ``k`` (multiply by spacing)."""
    a, b = domain.neighbor_pairs(stencil.offsets[k])
    mid = 0.5 * (domain.centers[a] + domain.centers[b])
    if g.isotropic:
        ref = np.array([[1.0, 0.0]])
        return stencil.weights[k] * np.asarray(g.evaluate(mid, ref), dtype=float)
    gv = np.asarray(g.evaluate(mid[:, None, :], stencil.normals[None, :, :]), dtype=float)
    gv = np.broadcast_to(gv, (len(mid), len(stencil.offsets)))
    return stencil.coefficients(gv)[:, k]


def large_penalty(g, rho, spacing) -> float:
    """Finite stand-in for the forbidden SOLID_PLUS/SOLID_MINUS contact."""
    return 1e6 * g.beta * rho / spacing


def perimeter_energy(labels: LabelField, g, stencil: Stencil) -> float:
    """Anisotropic perimeter of the label interfaces.

    In three-label mode only VOID/solid interfaces are charged; a direct
    SOLID_PLUS/SOLID_MINUS contact makes the energy infinite.
    """
    if stencil.tau is None:
        raise CalibrationError("stencil is not calibrated")
    dom = labels.domain
    lab = np.asarray(labels.labels)
    total = 0.0
    for k in range(len(stencil.offsets)):
        a, b = dom.neighbor_pairs(stencil.offsets[k])
        diff = lab[a] != lab[b]
        if labels.mode == "three" and np.any(np.abs(lab[a].astype(int) - lab[b]) == 2):
            return float("inf")
        if not diff.any():
            continue
        w = edge_coefficients(dom, stencil, g, k)
        total += float(w[diff].sum())
    return total * dom.spacing
