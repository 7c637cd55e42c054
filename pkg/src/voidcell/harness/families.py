"""Density families addressable by name from experiment configs."""
from __future__ import annotations

from voidcell import densities as D

SURFACE, BULK = "surface", "bulk"


def _counterexample(params, spacing):
    p = dict(params)
    if "line_halfwidth" not in p:
        # the line is thickened to one lattice cell
        p["line_halfwidth"] = 0.5 * spacing if spacing else 1.0 / 256
    return D.make_counterexample_surface(**p)


def _vec(p, key):
    if key in p:
        p[key] = tuple(float(v) for v in p[key])
    return p


FAMILIES = {
    "constant-surface": (SURFACE, lambda p, h: D.constant_surface(**p)),
    "stripe-surface": (SURFACE, lambda p, h: D.make_stripe_surface(**_vec(dict(p), "layer_normal"))),
    "sinusoid-surface": (SURFACE, lambda p, h: D.make_sinusoid_surface(**_vec(dict(p), "layer_normal"))),
    "counterexample-surface": (SURFACE, _counterexample),
    "crystalline-surface": (SURFACE, lambda p, h: D.crystalline_surface(**p)),
    "nonconvex-surface": (SURFACE, lambda p, h: D.nonconvex_surface(**p)),
    "homogeneous-bulk": (BULK, lambda p, h: D.homogeneous_bulk(**p)),
    "laminate-bulk": (BULK, lambda p, h: D.make_laminate_bulk(**_vec(dict(p), "layer_normal"))),
}


def family_type(name: str) -> str:
    return FAMILIES[name][0]


def build_density(name: str, params: dict, spacing: float | None = None):
    """Instantiate family ``name``; ``spacing`` feeds resolution-tied defaults."""
    if name not in FAMILIES:
        raise KeyError(name)
    return FAMILIES[name][1](params or {}, spacing)
