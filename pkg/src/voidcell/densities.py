"""Bulk and surface energy densities, their growth checks, and built-in families.

All ``evaluate`` callables are vectorized: points have shape (..., 2), strain
matrices (..., 2, 2) and normals (..., 2); leading shapes broadcast.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np


class DensityError(ValueError):
    """Invalid density constants or unsupported density."""


def sym(xi):
    xi = np.asarray(xi, dtype=float)
    return 0.5 * (xi + np.swapaxes(xi, -1, -2))


def strain_sq(xi, scalar_mode=False):
    """Squared strain measure the growth bounds are stated against.

    Plane elasticity uses |sym xi|^2.  In antiplane mode only the last row of
    xi is the gradient of the out-of-plane displacement, so |xi[-1]|^2 is used.
    """
    xi = np.asarray(xi, dtype=float)
    if scalar_mode:
        return np.sum(xi[..., -1, :] ** 2, axis=-1)
    return np.sum(sym(xi) ** 2, axis=(-1, -2))


@dataclass(frozen=True)
class BulkDensity:
    evaluate: Callable
    alpha: float
    beta: float
    p: int = 2
    convex_in_xi: bool = True
    scalar_mode: bool = False
    #: a(x) for the quadratic family f(x, xi) = a(x) * strain_sq(xi); None otherwise
    coefficient: Callable | None = None
    period: float | None = None
    name: str = "bulk"

    def __post_init__(self):
        if self.p != 2:
            raise DensityError("only p = 2 is supported")
        if not (0 < self.alpha <= self.beta):
            raise DensityError("need 0 < alpha <= beta")

    def __call__(self, x, xi):
        return self.evaluate(x, xi)

    def frozen(self, x) -> "BulkDensity":
        """The density with its spatial argument fixed at ``x``."""
        x = np.asarray(x, dtype=float)
        ev = self.evaluate
        coef = None
        if self.coefficient is not None:
            a0 = float(self.coefficient(x))
            coef = lambda y, a0=a0: np.full(np.shape(y)[:-1], a0)
        return replace(self, evaluate=lambda y, xi: ev(np.broadcast_to(x, np.shape(y)), xi),
                       coefficient=coef, period=None, name=f"{self.name}@frozen")


@dataclass(frozen=True)
class SurfaceDensity:
    evaluate: Callable
    alpha: float
    beta: float
    continuous_in_x: bool = True
    #: True when evaluate ignores the normal; enables the fast edge-weight path
    isotropic: bool = False
    period: float | None = None
    name: str = "surface"

    def __post_init__(self):
        if not (0 < self.alpha <= self.beta):
            raise DensityError("need 0 < alpha <= beta")

    def __call__(self, x, nu):
        return self.evaluate(x, nu)

    def scale(self, c: float) -> "SurfaceDensity":
        """The density c * g."""
        if c <= 0:
            raise DensityError("scale must be positive")
        ev = self.evaluate
        return replace(self, evaluate=lambda x, nu: c * ev(x, nu), alpha=c * self.alpha,
                       beta=c * self.beta, name=f"{c:g}*{self.name}")

    def rescaled(self, eps: float) -> "SurfaceDensity":
        """g_eps(x, nu) = g(x / eps, nu), the oscillating family of the periodic case."""
        ev = self.evaluate
        return replace(self, evaluate=lambda x, nu: ev(np.asarray(x, dtype=float) / eps, nu),
                       period=None if self.period is None else self.period * eps,
                       name=f"{self.name}(x/{eps:g})")

    def frozen(self, x) -> "SurfaceDensity":
        x = np.asarray(x, dtype=float)
        ev = self.evaluate
        return replace(self, evaluate=lambda y, nu: ev(np.broadcast_to(x, np.shape(y)), nu),
                       continuous_in_x=True, period=None, name=f"{self.name}@frozen")


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, condition, x, arg, value, detail):
        self.violations.append({"condition": condition, "x": np.asarray(x).tolist(),
                                "arg": np.asarray(arg).tolist(), "value": float(value),
                                "detail": detail})


def validate_bulk(f: BulkDensity, sample_points, rtol=1e-12) -> ValidationReport:
    """Check (f1)-(f3) and the dependence on the symmetric part on samples ``(x, xi)``."""
    samples = list(sample_points)
    if not samples:
        raise ValueError("empty sample set")
    rep = ValidationReport()
    for x, xi in samples:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        val = float(f.evaluate(x, xi))
        zero = float(f.evaluate(x, np.zeros((2, 2))))
        if zero != 0.0:
            rep.add("f1", x, np.zeros((2, 2)), zero, "f(x, 0) != 0")
        s2 = float(strain_sq(xi, f.scalar_mode))
        tol = rtol * max(1.0, abs(val))
        if val < f.alpha * s2 - tol:
            rep.add("f2", x, xi, val, f"below alpha*|e|^2 = {f.alpha * s2:g}")
        if val > f.beta * (1.0 + s2) + tol:
            rep.add("f3", x, xi, val, f"above beta*(1+|e|^2) = {f.beta * (1 + s2):g}")
        if not f.scalar_mode:
            vs = float(f.evaluate(x, sym(xi)))
            if abs(vs - val) > tol:
                rep.add("sym", x, xi, val, f"f(x, sym xi) = {vs:g} differs")
    return rep


def validate_surface(g: SurfaceDensity, sample_points, rtol=1e-12) -> ValidationReport:
    """Check (g1)-(g3) on samples ``(x, nu)``."""
    samples = list(sample_points)
    if not samples:
        raise ValueError("empty sample set")
    rep = ValidationReport()
    for x, nu in samples:
        x = np.asarray(x, dtype=float)
        nu = np.asarray(nu, dtype=float)
        val = float(g.evaluate(x, nu))
        tol = rtol * max(1.0, abs(val))
        neg = float(g.evaluate(x, -nu))
        if abs(neg - val) > tol:
            rep.add("g1", x, nu, val, f"g(x, -nu) = {neg:g}")
        if val < g.alpha - tol:
            rep.add("g2", x, nu, val, f"below alpha = {g.alpha:g}")
        if val > g.beta + tol:
            rep.add("g3", x, nu, val, f"above beta = {g.beta:g}")
    return rep


def default_bulk_samples(n=5, extent=1.0, seed=0):
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-extent, extent, size=(n, 2))
    xis = [np.zeros((2, 2)), np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]),
           np.array([[0.0, 0.0], [1.0, 0.0]])] + list(rng.normal(size=(6, 2, 2)))
    return [(x, xi) for x in xs for xi in xis]


def default_surface_samples(n=7, extent=1.0, n_dirs=16, seed=0):
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-extent, extent, size=(n, 2))
    th = np.arange(n_dirs) * np.pi / n_dirs
    nus = np.stack([np.cos(th), np.sin(th)], axis=1)
    return [(x, nu) for x in xs for nu in nus]


# --- built-in families -------------------------------------------------------

def _unit(v):
    v = np.asarray(v, dtype=float)
    nrm = np.linalg.norm(v)
    if not np.isclose(nrm, 1.0, atol=1e-12):
        raise DensityError("layer normal must be a unit vector")
    return v / nrm


def _phase_high(x, normal, period):
    """True on the second half of each period along ``normal``."""
    t = np.tensordot(np.asarray(x, dtype=float), normal, axes=([-1], [0])) / period
    return (t - np.floor(t)) >= 0.5


def homogeneous_bulk(a=1.0, scalar_mode=False) -> BulkDensity:
    if a <= 0:
        raise DensityError("coefficient must be positive")
    coef = lambda x: np.full(np.shape(x)[:-1], float(a))
    return BulkDensity(lambda x, xi: a * strain_sq(xi, scalar_mode), alpha=a, beta=a,
                       scalar_mode=scalar_mode, coefficient=coef, name=f"homogeneous({a:g})")


def make_laminate_bulk(a_low, a_high, layer_normal=(1.0, 0.0), period=1.0,
                       scalar_mode=False) -> BulkDensity:
    """f(x, xi) = a(<x, n> / period) |e|^2 with a = a_low, a_high on alternating half-periods."""
    if not (0 < a_low <= a_high) or period <= 0:
        raise DensityError("need 0 < a_low <= a_high and period > 0")
    n = _unit(layer_normal)

    def coef(x):
        return np.where(_phase_high(x, n, period), float(a_high), float(a_low))

    def evaluate(x, xi):
        return coef(x) * strain_sq(xi, scalar_mode)

    return BulkDensity(evaluate, alpha=a_low, beta=a_high, scalar_mode=scalar_mode,
                       coefficient=coef, period=period,
                       name=f"laminate({a_low:g},{a_high:g})")


def constant_surface(value=1.0) -> SurfaceDensity:
    if value <= 0:
        raise DensityError("surface density must be positive")
    return SurfaceDensity(lambda x, nu: np.full(np.broadcast_shapes(np.shape(x)[:-1], np.shape(nu)[:-1]),
                                                float(value)),
                          alpha=value, beta=value, isotropic=True, name=f"constant({value:g})")


def make_stripe_surface(g_low, g_high, layer_normal=(1.0, 0.0), period=1.0) -> SurfaceDensity:
    """Two-phase striped density independent of the normal; g_low on [0, period/2)."""
    if not (0 < g_low <= g_high) or period <= 0:
        raise DensityError("need 0 < g_low <= g_high and period > 0")
    n = _unit(layer_normal)

    def evaluate(x, nu):
        v = np.where(_phase_high(x, n, period), float(g_high), float(g_low))
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(v), np.shape(nu)[:-1])).copy()

    return SurfaceDensity(evaluate, alpha=g_low, beta=g_high, continuous_in_x=g_low == g_high,
                          isotropic=True, period=period, name=f"stripes({g_low:g},{g_high:g})")


def make_sinusoid_surface(mean=1.5, amplitude=0.5, layer_normal=(1.0, 0.0), period=1.0) -> SurfaceDensity:
    """g(x) = mean + amplitude * sin(2 pi <x, n> / period), continuous and periodic."""
    if amplitude < 0 or mean - amplitude <= 0 or period <= 0:
        raise DensityError("need mean > amplitude >= 0 and period > 0")
    n = _unit(layer_normal)

    def evaluate(x, nu):
        t = np.tensordot(np.asarray(x, dtype=float), n, axes=([-1], [0])) / period
        v = mean + amplitude * np.sin(2 * np.pi * t)
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(v), np.shape(nu)[:-1])).copy()

    return SurfaceDensity(evaluate, alpha=mean - amplitude, beta=mean + amplitude,
                          isotropic=True, period=period, name=f"sinusoid({mean:g},{amplitude:g})")


def make_counterexample_surface(line_x=0.5, cheap=1.0, expensive=2.0,
                                line_halfwidth=1.0 / 256) -> SurfaceDensity:
    """cheap on the band |x1 - line_x| <= line_halfwidth, expensive elsewhere.

    The band thickens the vertical line {line_x} x R so a raster can see it;
    the natural choice is half a lattice spacing.
    """
    if not (0 < cheap < expensive) or line_halfwidth <= 0:
        raise DensityError("need 0 < cheap < expensive and a positive half-width")

    def evaluate(x, nu):
        x1 = np.asarray(x, dtype=float)[..., 0]
        v = np.where(np.abs(x1 - line_x) <= line_halfwidth, float(cheap), float(expensive))
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(v), np.shape(nu)[:-1])).copy()

    return SurfaceDensity(evaluate, alpha=cheap, beta=expensive, continuous_in_x=False,
                          isotropic=True, name="counterexample")


def crystalline_surface(scale=1.0) -> SurfaceDensity:
    """g(nu) = scale * (|nu_1| + |nu_2|), constant in x."""
    def evaluate(x, nu):
        nu = np.asarray(nu, dtype=float)
        v = scale * (np.abs(nu[..., 0]) + np.abs(nu[..., 1]))
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(x)[:-1], v.shape)).copy()

    return SurfaceDensity(evaluate, alpha=scale, beta=np.sqrt(2) * scale, name="crystalline")


def nonconvex_surface(top=2.0) -> SurfaceDensity:
    """g(nu) = top - |nu_1|: cheapest for vertical interfaces, not convex in nu."""
    def evaluate(x, nu):
        nu = np.asarray(nu, dtype=float)
        v = top - np.abs(nu[..., 0])
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(x)[:-1], v.shape)).copy()

    return SurfaceDensity(evaluate, alpha=top - 1.0, beta=top, name="nonconvex")
