"""Cell results and the normalization constants shared by all solvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: length of the unit 1-ball, the surface normalization rho -> gamma_1 * rho
GAMMA1 = 2.0
#: area of the unit disc, the bulk normalization on balls
GAMMA2 = float(np.pi)


@dataclass
class CellResult:
    kind: str
    raw_energy: float
    normalized: float
    normalization: float
    normalization_label: str
    tolerance: float
    diagnostics: dict = field(default_factory=dict)
    labels: object = None
    field: np.ndarray | None = None

    def summary(self) -> dict:
        return {"kind": self.kind, "raw_energy": self.raw_energy, "normalized": self.normalized,
                "normalization": self.normalization,
                "normalization_label": self.normalization_label,
                "tolerance": self.tolerance, "diagnostics": self.diagnostics}


@dataclass
class SequenceResult:
    """A density estimate from a (rho, eps) or r sweep."""

    kind: str
    estimate: float
    tolerance: float
    limit: dict
    cells: list = field(default_factory=list)     # (outer, inner, CellResult)
    companion: "SequenceResult | None" = None      # 2 g-hat for jump sequences

    @property
    def gap(self) -> float | None:
        if self.companion is None:
            return None
        return self.estimate - 2 * self.companion.estimate

    def summary(self) -> dict:
        out = {"kind": self.kind, "estimate": self.estimate, "tolerance": self.tolerance,
               "limit": self.limit}
        if self.companion is not None:
            out["companion_2g"] = 2 * self.companion.estimate
            out["companion_tolerance"] = 2 * self.companion.tolerance
            out["gap"] = self.gap
        return out
