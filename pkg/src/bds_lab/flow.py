"""Feasible circulations with lower bounds, on top of scipy's max-flow."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

Arc = tuple[int, int, int, int]  # (tail, head, lower, upper)


def feasible_circulation(num_nodes: int, arcs: Sequence[Arc]) -> Optional[list[int]]:
    """Integral circulation meeting every ``lower <= f <= upper``, or ``None``.

    Standard reduction: push each lower bound up front, then route the node
    imbalances from a super source to a super sink in the residual
    capacities ``upper - lower``.  Parallel and antiparallel arcs are split
    through an auxiliary node so per-arc flows can be read back.
    """
    excess = [0] * num_nodes
    rows, cols, caps = [], [], []
    route = []  # per input arc: (u, v) whose flow entry carries its residual flow
    used: set[tuple[int, int]] = set()
    nxt = num_nodes
    for u, v, lo, hi in arcs:
        if lo > hi or lo < 0:
            raise ValueError(f"bad bounds [{lo}, {hi}] on arc {u}->{v}")
        excess[v] += lo
        excess[u] -= lo
        pair = (min(u, v), max(u, v))
        if pair in used or u == v:
            a = nxt
            nxt += 1
            rows += [u, a]
            cols += [a, v]
            caps += [hi - lo, hi - lo]
            route.append((u, a))
        else:
            used.add(pair)
            rows.append(u)
            cols.append(v)
            caps.append(hi - lo)
            route.append((u, v))
    src, snk = nxt, nxt + 1
    need = 0
    for node, ex in enumerate(excess):
        if ex > 0:
            rows.append(src)
            cols.append(node)
            caps.append(ex)
            need += ex
        elif ex < 0:
            rows.append(node)
            cols.append(snk)
            caps.append(-ex)
    if need == 0:
        flows = [0] * len(arcs)
    else:
        size = snk + 1
        g = csr_matrix(
            (np.asarray(caps, dtype=np.int32), (np.asarray(rows), np.asarray(cols))),
            shape=(size, size),
        )
        res = maximum_flow(g, src, snk, method="dinic")
        if res.flow_value < need:
            return None
        fl = res.flow.tocoo()
        lookup = {(int(r), int(c)): int(d) for r, c, d in zip(fl.row, fl.col, fl.data) if d > 0}
        flows = [lookup.get(rc, 0) for rc in route]
    return [f + arc[2] for f, arc in zip(flows, arcs)]
