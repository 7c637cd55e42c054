import numpy as np
import pytest
from hypothesis import given, strategies as st

from voidcell.maxflow import (MAX_CAPACITY, QUANT_SCALE, CutProblem, FlowNetwork, NetworkError,
                              cut_to_labels, dequantize, max_flow, quantize)
from voidcell.oracles import brute_force_mincut


def random_network(rng, n_max=12, cap_max=9):
    n = int(rng.integers(2, n_max + 1))
    s, t = rng.choice(n, size=2, replace=False)
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < 0.35:
                arcs.append((u, v, int(rng.integers(0, cap_max + 1))))
    return n, int(s), int(t), arcs


@st.composite
def networks(draw):
    n = draw(st.integers(2, 9))
    s = draw(st.integers(0, n - 1))
    t = draw(st.integers(0, n - 2))
    t = t + 1 if t >= s else t
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=25, unique=True))
    arcs = [(u, v, draw(st.integers(0, 9))) for u, v in chosen]
    return n, s, t, arcs


def test_matches_brute_force_on_fixed_seed():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n, s, t, arcs = random_network(rng)
        res = max_flow(FlowNetwork.from_arcs(n, s, t, arcs))
        assert res.flow_value == brute_force_mincut(n, s, t, arcs)


@given(networks())
def test_flow_equals_cut(net):
    n, s, t, arcs = net
    res = max_flow(FlowNetwork.from_arcs(n, s, t, arcs))
    assert res.flow_value == res.cut_capacity
    assert res.source_side[s] and not res.source_side[t]
    assert res.flow_value == brute_force_mincut(n, s, t, arcs)


@given(networks(), st.integers(0, 30), st.integers(0, 9))
def test_raising_a_capacity_never_lowers_the_flow(net, k, extra):
    n, s, t, arcs = net
    if not arcs:
        return
    base = max_flow(FlowNetwork.from_arcs(n, s, t, arcs)).flow_value
    k %= len(arcs)
    u, v, c = arcs[k]
    bumped = arcs[:k] + [(u, v, c + extra)] + arcs[k + 1:]
    assert max_flow(FlowNetwork.from_arcs(n, s, t, bumped)).flow_value >= base


@given(networks(), st.integers(1, 5))
def test_scaling(net, lam):
    n, s, t, arcs = net
    a = max_flow(FlowNetwork.from_arcs(n, s, t, arcs)).flow_value
    b = max_flow(FlowNetwork.from_arcs(n, s, t, [(u, v, lam * c) for u, v, c in arcs])).flow_value
    assert b == lam * a


def test_dump_load_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    n, s, t, arcs = random_network(rng)
    net = FlowNetwork.from_arcs(n, s, t, arcs)
    path = tmp_path / "net.txt"
    net.dump(path)
    assert path.read_text().startswith(f"# nodes {n} source {s} sink {t}")
    again = FlowNetwork.load(path)
    assert max_flow(again).flow_value == max_flow(net).flow_value


def test_rejects_bad_networks():
    with pytest.raises(NetworkError):
        FlowNetwork.from_arcs(3, 0, 0, [])
    with pytest.raises(NetworkError):
        FlowNetwork.from_arcs(3, 0, 2, [(0, 1, -1)])
    with pytest.raises(NetworkError):
        FlowNetwork.from_arcs(3, 0, 2, [(1, 1, 2)])
    with pytest.raises(NetworkError):
        FlowNetwork.from_arcs(3, 0, 2, [(0, 5, 2)])
    with pytest.raises(NetworkError):
        FlowNetwork.from_arcs(3, 0, 2, [(0, 1, MAX_CAPACITY + 1)])


def test_quantize():
    q = quantize([0.0, 1.0, 0.5])
    assert q.dtype == np.int64
    assert list(q) == [0, int(QUANT_SCALE), int(QUANT_SCALE) // 2]
    assert dequantize(q[1]) == 1.0
    with pytest.raises(NetworkError):
        quantize([-1e-3])
    with pytest.raises(NetworkError):
        quantize([np.nan])


def test_cut_problem_chain():
    # s -> 0 -> 1 -> 2 -> t with a bottleneck of 2 in the middle
    p = CutProblem(3)
    p.add_source([0], [10])
    p.add_arcs([0, 1], [1, 2], [2, 7])
    p.add_sink([2], [10])
    p.constant = 5
    value, side = p.solve()
    assert value == 7
    assert list(side) == [True, False, False]


def test_cut_to_labels():
    side = np.array([True, False])
    node = np.array([-1, 0, 1, -1])
    labels = cut_to_labels(side, node, np.array([7, 0, 0, 8]), 1, 2)
    assert list(labels) == [7, 1, 2, 8]
    with pytest.raises(NetworkError):
        cut_to_labels(side, np.array([0, 3]), np.zeros(2), 1, 2)
