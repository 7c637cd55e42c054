"""Limit estimates from finite scale sweeps.

A cell value is computed on a handful of scales (layer width, ball radius,
cube size) and the limit is read off a least-squares fit
``value = L + c * scale**q`` for q in {1, 2}.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

INNER_EPS = "inner_eps"
OUTER_RHO = "outer_rho"
R_GROWTH = "r_growth"


class SeriesError(ValueError):
    """Scale series unusable for extrapolation."""


@dataclass
class ScaleSeries:
    scales: np.ndarray
    values: np.ndarray
    kind: str = INNER_EPS

    def __post_init__(self):
        s = np.asarray(self.scales, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.shape != v.shape or s.ndim != 1:
            raise SeriesError("scales and values must be 1-d and equally long")
        if len(s) < 3:
            raise SeriesError("need at least three points")
        if np.any(s <= 0):
            raise SeriesError("scales must be positive")
        order = np.argsort(-s, kind="stable")
        s, v = s[order], v[order]
        if np.any(np.diff(s) >= 0):
            raise SeriesError("scales must be strictly monotone")
        self.scales, self.values = s, v


@dataclass
class LimitEstimate:
    estimate: float
    spread: float
    order: int | None
    fallback: bool
    max_observed: float
    residual: float = 0.0

    def as_dict(self):
        return {"estimate": self.estimate, "spread": self.spread, "order": self.order,
                "fallback": self.fallback, "max_observed": self.max_observed,
                "residual": self.residual}


def _is_monotone(v, rtol=1e-12):
    d = np.diff(v)
    tol = rtol * max(1.0, float(np.max(np.abs(v))))
    d = np.where(np.abs(d) <= tol, 0.0, d)
    return bool(np.all(d >= 0) or np.all(d <= 0))


def _fallback(values):
    v = np.asarray(values)
    return LimitEstimate(float(v[-1]), float(v.max() - v.min()), None, True, float(v.max()))


def estimate_limit(series: ScaleSeries) -> LimitEstimate:
    """Extrapolate ``series`` to scale 0.

    Both model orders are fitted and the one with the smaller residual wins
    (q = 1 on ties).  ``spread`` is the worst fit misfit plus the distance from
    the finest observed value to the estimate.  Non-monotone or ill-conditioned
    data fall back to the finest value with the full range as spread.
    """
    s, v = series.scales, series.values
    if not _is_monotone(v):
        return _fallback(v)
    best = None
    for q in (1, 2):
        X = np.stack([np.ones_like(s), s**q], axis=1)
        if np.linalg.cond(X) > 1e12:
            continue
        coef, *_ = np.linalg.lstsq(X, v, rcond=None)
        fit = X @ coef
        res = float(np.sum((fit - v) ** 2))
        if best is None or res < best[0] - 1e-30:
            best = (res, q, coef, fit)
    if best is None:
        return _fallback(v)
    res, q, coef, fit = best
    L = float(coef[0])
    spread = float(np.max(np.abs(fit - v)) + abs(v[-1] - L))
    return LimitEstimate(L, spread, q, False, float(v.max()), res)


@dataclass
class DoubleLimit:
    estimate: float
    tolerance: float
    inner: list = field(default_factory=list)
    outer: LimitEstimate | None = None
    outer_scales: list = field(default_factory=list)
    max_observed: float = 0.0

    def as_dict(self):
        return {"estimate": self.estimate, "tolerance": self.tolerance,
                "max_observed": self.max_observed,
                "outer_scales": list(self.outer_scales),
                "outer": self.outer.as_dict() if self.outer else None,
                "inner": [e.as_dict() for e in self.inner]}


def double_limit(inner_series: dict, outer_kind: str = OUTER_RHO) -> DoubleLimit:
    """Inner extrapolation at each outer scale, then extrapolation over the outer scale.

    ``inner_series`` maps outer scale -> ScaleSeries.  With only two outer
    scales the finest one is reported and the spread is their difference.
    """
    if len(inner_series) < 2:
        raise SeriesError("need at least two outer scales")
    outer_scales = sorted(inner_series, reverse=True)
    inner = [estimate_limit(inner_series[r]) for r in outer_scales]
    vals = np.array([e.estimate for e in inner])
    if len(outer_scales) >= 3:
        outer = estimate_limit(ScaleSeries(outer_scales, vals, outer_kind))
    else:
        outer = LimitEstimate(float(vals[-1]), float(abs(vals[0] - vals[1])), None, True,
                              float(vals.max()))
    tol = outer.spread + max(e.spread for e in inner)
    max_obs = max(float(np.max(inner_series[r].values)) for r in outer_scales)
    return DoubleLimit(outer.estimate, tol, inner, outer, outer_scales, max_obs)
