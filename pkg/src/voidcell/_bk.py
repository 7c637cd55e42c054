"""Boykov-Kolmogorov augmenting-path max-flow, compiled with numba.

Nodes are 0..n-1; the terminals are implicit.  Arc ``2*i`` runs tail[i] -> head[i]
and arc ``2*i + 1`` is its sister.  Terminal capacities are folded into a single
signed residual per node (positive: source side, negative: sink side).
"""
import numpy as np
from numba import njit

TERMINAL = -1
ORPHAN = -2
NONE = -3
_INF_DIST = 1 << 60


@njit(cache=True)
def _adjacency(n, tail, head):
    m = tail.shape[0]
    deg = np.zeros(n + 1, dtype=np.int64)
    for i in range(m):
        deg[tail[i] + 1] += 1
        deg[head[i] + 1] += 1
    for i in range(n):
        deg[i + 1] += deg[i]
    start = deg.copy()
    fill = deg[:-1].copy()
    out = np.empty(2 * m, dtype=np.int64)
    arc_head = np.empty(2 * m, dtype=np.int64)
    for i in range(m):
        out[fill[tail[i]]] = 2 * i
        fill[tail[i]] += 1
        out[fill[head[i]]] = 2 * i + 1
        fill[head[i]] += 1
        arc_head[2 * i] = head[i]
        arc_head[2 * i + 1] = tail[i]
    return start, out, arc_head


@njit(cache=True)
def bk_maxflow(n, tail, head, cap, rev_cap, tr_cap_in):
    """Return (flow, source_side mask, residual capacities).

    ``flow`` excludes any flow routed directly terminal-to-terminal through a
    node carrying both source and sink capacity; callers add that part.
    """
    start, out, arc_head = _adjacency(n, tail, head)
    m = tail.shape[0]
    r_cap = np.empty(2 * m, dtype=np.int64)
    for i in range(m):
        r_cap[2 * i] = cap[i]
        r_cap[2 * i + 1] = rev_cap[i]
    tr_cap = tr_cap_in.copy()

    parent = np.full(n, NONE, dtype=np.int64)
    is_sink = np.zeros(n, dtype=np.bool_)
    ts = np.zeros(n, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)

    # circular FIFO of active nodes
    qcap = n + 1
    queue = np.empty(qcap, dtype=np.int64)
    in_queue = np.zeros(n, dtype=np.bool_)
    qhead = 0
    qtail = 0

    orphans = np.empty(qcap, dtype=np.int64)
    ohead = 0
    otail = 0

    for i in range(n):
        if tr_cap[i] > 0:
            parent[i] = TERMINAL
            dist[i] = 1
            queue[qtail] = i
            qtail = (qtail + 1) % qcap
            in_queue[i] = True
        elif tr_cap[i] < 0:
            parent[i] = TERMINAL
            is_sink[i] = True
            dist[i] = 1
            queue[qtail] = i
            qtail = (qtail + 1) % qcap
            in_queue[i] = True

    flow = 0
    time = 0
    current = -1
    while True:
        i = current
        if i == -1 or parent[i] == NONE:
            i = -1
            while qhead != qtail:
                k = queue[qhead]
                qhead = (qhead + 1) % qcap
                in_queue[k] = False
                if parent[k] != NONE:
                    i = k
                    break
            if i == -1:
                break

        # growth
        found = -1
        if not is_sink[i]:
            for kk in range(start[i], start[i + 1]):
                a = out[kk]
                if r_cap[a] > 0:
                    j = arc_head[a]
                    if parent[j] == NONE:
                        is_sink[j] = False
                        parent[j] = a ^ 1
                        ts[j] = ts[i]
                        dist[j] = dist[i] + 1
                        if not in_queue[j]:
                            queue[qtail] = j
                            qtail = (qtail + 1) % qcap
                            in_queue[j] = True
                    elif is_sink[j]:
                        found = a
                        break
                    elif ts[j] <= ts[i] and dist[j] > dist[i]:
                        parent[j] = a ^ 1
                        ts[j] = ts[i]
                        dist[j] = dist[i] + 1
        else:
            for kk in range(start[i], start[i + 1]):
                a = out[kk]
                if r_cap[a ^ 1] > 0:
                    j = arc_head[a]
                    if parent[j] == NONE:
                        is_sink[j] = True
                        parent[j] = a ^ 1
                        ts[j] = ts[i]
                        dist[j] = dist[i] + 1
                        if not in_queue[j]:
                            queue[qtail] = j
                            qtail = (qtail + 1) % qcap
                            in_queue[j] = True
                    elif not is_sink[j]:
                        found = a ^ 1
                        break
                    elif ts[j] <= ts[i] and dist[j] > dist[i]:
                        parent[j] = a ^ 1
                        ts[j] = ts[i]
                        dist[j] = dist[i] + 1

        time += 1
        if found == -1:
            current = -1
            continue
        current = i

        # augment along source-tree path + found arc + sink-tree path
        a = found
        bottleneck = r_cap[a]
        k = arc_head[a ^ 1]
        while parent[k] != TERMINAL:
            pa = parent[k]
            if r_cap[pa ^ 1] < bottleneck:
                bottleneck = r_cap[pa ^ 1]
            k = arc_head[pa]
        if tr_cap[k] < bottleneck:
            bottleneck = tr_cap[k]
        k = arc_head[a]
        while parent[k] != TERMINAL:
            pa = parent[k]
            if r_cap[pa] < bottleneck:
                bottleneck = r_cap[pa]
            k = arc_head[pa]
        if -tr_cap[k] < bottleneck:
            bottleneck = -tr_cap[k]

        r_cap[a ^ 1] += bottleneck
        r_cap[a] -= bottleneck
        k = arc_head[a ^ 1]
        while parent[k] != TERMINAL:
            pa = parent[k]
            nxt = arc_head[pa]
            r_cap[pa] += bottleneck
            r_cap[pa ^ 1] -= bottleneck
            if r_cap[pa ^ 1] == 0:
                parent[k] = ORPHAN
                ohead = (ohead - 1) % qcap
                orphans[ohead] = k
            k = nxt
        tr_cap[k] -= bottleneck
        if tr_cap[k] == 0:
            parent[k] = ORPHAN
            ohead = (ohead - 1) % qcap
            orphans[ohead] = k
        k = arc_head[a]
        while parent[k] != TERMINAL:
            pa = parent[k]
            nxt = arc_head[pa]
            r_cap[pa ^ 1] += bottleneck
            r_cap[pa] -= bottleneck
            if r_cap[pa] == 0:
                parent[k] = ORPHAN
                ohead = (ohead - 1) % qcap
                orphans[ohead] = k
            k = nxt
        tr_cap[k] += bottleneck
        if tr_cap[k] == 0:
            parent[k] = ORPHAN
            ohead = (ohead - 1) % qcap
            orphans[ohead] = k
        flow += bottleneck

        # adoption
        while ohead != otail:
            o = orphans[ohead]
            ohead = (ohead + 1) % qcap
            sink_side = is_sink[o]
            best = -1
            best_d = _INF_DIST
            for kk in range(start[o], start[o + 1]):
                a0 = out[kk]
                if sink_side:
                    ok = r_cap[a0] > 0
                else:
                    ok = r_cap[a0 ^ 1] > 0
                if not ok:
                    continue
                j = arc_head[a0]
                if is_sink[j] != sink_side or parent[j] == NONE:
                    continue
                d = 0
                jj = j
                while True:
                    if ts[jj] == time:
                        d += dist[jj]
                        break
                    pa = parent[jj]
                    d += 1
                    if pa == TERMINAL:
                        ts[jj] = time
                        dist[jj] = 1
                        break
                    if pa == ORPHAN:
                        d = _INF_DIST
                        break
                    jj = arc_head[pa]
                if d < _INF_DIST:
                    if d < best_d:
                        best = a0
                        best_d = d
                    jj = j
                    while ts[jj] != time:
                        ts[jj] = time
                        dist[jj] = d
                        d -= 1
                        jj = arc_head[parent[jj]]
            if best != -1:
                parent[o] = best
                ts[o] = time
                dist[o] = best_d + 1
            else:
                for kk in range(start[o], start[o + 1]):
                    a0 = out[kk]
                    j = arc_head[a0]
                    if is_sink[j] != sink_side or parent[j] == NONE:
                        continue
                    if sink_side:
                        ok = r_cap[a0] > 0
                    else:
                        ok = r_cap[a0 ^ 1] > 0
                    if ok and not in_queue[j]:
                        queue[qtail] = j
                        qtail = (qtail + 1) % qcap
                        in_queue[j] = True
                    pa = parent[j]
                    if pa != TERMINAL and pa != ORPHAN and arc_head[pa] == o:
                        parent[j] = ORPHAN
                        orphans[otail] = j
                        otail = (otail + 1) % qcap
                parent[o] = NONE

    # source side = nodes reachable from the source in the residual graph
    seen = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        if tr_cap[i] > 0:
            seen[i] = True
            stack[top] = i
            top += 1
    while top > 0:
        top -= 1
        i = stack[top]
        for kk in range(start[i], start[i + 1]):
            a = out[kk]
            if r_cap[a] > 0:
                j = arc_head[a]
                if not seen[j]:
                    seen[j] = True
                    stack[top] = j
                    top += 1
    return flow, seen, r_cap
