"""Exact s-t max-flow / min-cut on integer capacities.

Surface solvers never talk to the kernel directly; they fill a :class:`CutProblem`
(terminal links + pairwise arcs) and read back which nodes ended on the source
side.  :class:`FlowNetwork` is the general-purpose front end with explicit
source and sink nodes, used for the oracle comparisons and text dumps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from voidcell._bk import bk_maxflow

#: fixed-point scale for edge weights (weight * 2**20, rounded)
QUANT_BITS = 20
QUANT_SCALE = float(1 << QUANT_BITS)
#: capacities must fit in 48 bits after quantization, sums are taken in int64
MAX_CAPACITY = (1 << 48) - 1


class NetworkError(ValueError):
    """Malformed flow network."""


class DualityError(RuntimeError):
    """Flow value and returned cut capacity disagree."""


def quantize(weights) -> np.ndarray:
    """Fixed-point integer capacities for nonnegative real weights."""
    w = np.asarray(weights, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise NetworkError("weights must be finite and nonnegative")
    q = np.rint(w * QUANT_SCALE).astype(np.int64)
    if q.size and q.max() > MAX_CAPACITY:
        raise NetworkError("weight exceeds the 48-bit capacity range")
    return q


def dequantize(value) -> float:
    return float(value) / QUANT_SCALE


@dataclass
class FlowNetwork:
    """Directed network; every arc carries a paired reverse arc (``rev_caps``)."""

    node_count: int
    source: int
    sink: int
    tails: np.ndarray
    heads: np.ndarray
    caps: np.ndarray
    rev_caps: np.ndarray | None = None

    def __post_init__(self):
        self.tails = np.asarray(self.tails, dtype=np.int64).ravel()
        self.heads = np.asarray(self.heads, dtype=np.int64).ravel()
        self.caps = np.asarray(self.caps, dtype=np.int64).ravel()
        if self.rev_caps is None:
            self.rev_caps = np.zeros_like(self.caps)
        self.rev_caps = np.asarray(self.rev_caps, dtype=np.int64).ravel()
        self.validate()

    @classmethod
    def from_arcs(cls, node_count, source, sink, arcs):
        """Build from ``(from, to, capacity)`` triples."""
        arcs = list(arcs)
        if arcs:
            t, h, c = (np.array(col) for col in zip(*arcs))
        else:
            t = h = c = np.zeros(0, dtype=np.int64)
        return cls(node_count, source, sink, t, h, c)

    def validate(self):
        n = self.node_count
        if n < 2:
            raise NetworkError("need at least two nodes")
        if not (0 <= self.source < n and 0 <= self.sink < n):
            raise NetworkError("terminal out of range")
        if self.source == self.sink:
            raise NetworkError("source and sink coincide")
        if not (len(self.tails) == len(self.heads) == len(self.caps) == len(self.rev_caps)):
            raise NetworkError("arc arrays differ in length")
        if len(self.tails) == 0:
            return
        if min(self.tails.min(), self.heads.min()) < 0 or max(self.tails.max(), self.heads.max()) >= n:
            raise NetworkError("arc endpoint out of range")
        if np.any(self.tails == self.heads):
            raise NetworkError("self-loop")
        if np.any(self.caps < 0) or np.any(self.rev_caps < 0):
            raise NetworkError("negative capacity")
        if max(self.caps.max(), self.rev_caps.max()) > MAX_CAPACITY:
            raise NetworkError("capacity exceeds 48 bits")

    def cut_capacity(self, source_side: np.ndarray) -> int:
        s = np.asarray(source_side, dtype=bool)
        fwd = s[self.tails] & ~s[self.heads]
        bwd = s[self.heads] & ~s[self.tails]
        return int(self.caps[fwd].sum() + self.rev_caps[bwd].sum())

    def dump(self, path):
        """Write the documented text format: a header line then one arc per line.

        ::

            # nodes <n> source <s> sink <t>
            <from> <to> <capacity>
        """
        lines = [f"# nodes {self.node_count} source {self.source} sink {self.sink}"]
        for t, h, c, r in zip(self.tails, self.heads, self.caps, self.rev_caps):
            lines.append(f"{t} {h} {c}")
            if r:
                lines.append(f"{h} {t} {r}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path):
        rows = Path(path).read_text().splitlines()
        head = rows[0].split()
        if head[:2] != ["#", "nodes"]:
            raise NetworkError("missing header line")
        n, s, t = int(head[2]), int(head[4]), int(head[6])
        arcs = [tuple(int(v) for v in r.split()) for r in rows[1:] if r.strip()]
        return cls.from_arcs(n, s, t, arcs)


@dataclass
class FlowResult:
    flow_value: int
    source_side: np.ndarray
    cut_capacity: int


def max_flow(network: FlowNetwork) -> FlowResult:
    """Max-flow value and the minimum cut reachable from the source.

    Raises :class:`DualityError` if the flow does not equal the cut capacity,
    which would indicate a kernel bug.
    """
    network.validate()
    n, s, t = network.node_count, network.source, network.sink
    tails, heads = network.tails, network.heads
    caps, rev = network.caps, network.rev_caps

    inner = np.array([i for i in range(n) if i not in (s, t)], dtype=np.int64)
    remap = np.full(n, -1, dtype=np.int64)
    remap[inner] = np.arange(len(inner))
    src_cap = np.zeros(len(inner), dtype=np.int64)
    snk_cap = np.zeros(len(inner), dtype=np.int64)
    direct = 0
    keep = np.zeros(len(tails), dtype=bool)
    for idx, (u, v, c, r) in enumerate(zip(tails, heads, caps, rev)):
        # each stored arc is really two directed arcs u->v (c) and v->u (r)
        for a, b, w in ((u, v, c), (v, u, r)):
            if w == 0:
                continue
            if a == s and b == t:
                direct += int(w)
            elif a == s and b != s:
                src_cap[remap[b]] += w
            elif b == t and a != t:
                snk_cap[remap[a]] += w
        if remap[u] >= 0 and remap[v] >= 0:
            keep[idx] = True

    sub = CutProblem(len(inner))
    sub.source_cap[:] = src_cap
    sub.sink_cap[:] = snk_cap
    sub.add_arcs(remap[tails[keep]], remap[heads[keep]], caps[keep], rev[keep])
    value, inner_side = sub.solve()
    side = np.zeros(n, dtype=bool)
    side[s] = True
    side[inner] = inner_side
    flow = value + direct
    cut = network.cut_capacity(side)
    if cut != flow:
        raise DualityError(f"flow {flow} != cut {cut}")
    return FlowResult(flow, side, cut)


class CutProblem:
    """Accumulates terminal links and arcs over ``n`` non-terminal nodes.

    Source side of the final cut means "variable true" for every caller.
    """

    def __init__(self, n: int):
        self.n = int(n)
        self.source_cap = np.zeros(self.n, dtype=np.int64)
        self.sink_cap = np.zeros(self.n, dtype=np.int64)
        self._t: list[np.ndarray] = []
        self._h: list[np.ndarray] = []
        self._c: list[np.ndarray] = []
        self._r: list[np.ndarray] = []
        self.constant = 0

    def add_arcs(self, tails, heads, caps, rev_caps=None):
        tails = np.asarray(tails, dtype=np.int64)
        heads = np.asarray(heads, dtype=np.int64)
        caps = np.broadcast_to(np.asarray(caps, dtype=np.int64), tails.shape)
        if rev_caps is None:
            rev_caps = np.zeros_like(caps)
        rev_caps = np.broadcast_to(np.asarray(rev_caps, dtype=np.int64), tails.shape)
        self._t.append(tails)
        self._h.append(heads)
        self._c.append(np.array(caps))
        self._r.append(np.array(rev_caps))

    def add_source(self, nodes, caps):
        np.add.at(self.source_cap, np.asarray(nodes, dtype=np.int64), caps)

    def add_sink(self, nodes, caps):
        np.add.at(self.sink_cap, np.asarray(nodes, dtype=np.int64), caps)

    def arc_count(self) -> int:
        return int(sum(len(t) for t in self._t))

    def solve(self) -> tuple[int, np.ndarray]:
        """Return (min-cut value, source-side mask), constant term included."""
        if self._t:
            t = np.concatenate(self._t)
            h = np.concatenate(self._h)
            c = np.concatenate(self._c)
            r = np.concatenate(self._r)
        else:
            t = h = c = r = np.zeros(0, dtype=np.int64)
        both = np.minimum(self.source_cap, self.sink_cap)
        tr = self.source_cap - self.sink_cap
        if self.n == 0:
            return int(both.sum()) + self.constant, np.zeros(0, dtype=bool)
        flow, side, _ = bk_maxflow(self.n, t, h, c, r, tr)
        return int(flow) + int(both.sum()) + self.constant, side


def cut_to_labels(source_side: np.ndarray, node_of_cell: np.ndarray, frozen_labels: np.ndarray,
                  source_label: int, sink_label: int) -> np.ndarray:
    """Per-cell labels from a cut.

    ``node_of_cell[i]`` is the network node of cell ``i`` or -1 for a frozen cell,
    which keeps ``frozen_labels[i]``.
    """
    node_of_cell = np.asarray(node_of_cell)
    if np.any(node_of_cell < -1) or np.any(node_of_cell >= len(source_side)):
        raise NetworkError("unmapped cell")
    labels = np.array(frozen_labels, copy=True)
    free = node_of_cell >= 0
    labels[free] = np.where(source_side[node_of_cell[free]], source_label, sink_label)
    return labels
