"""One-inclusion hypergraphs and exact min-max L-outdegree list orientations.

Edges of size at most ``L`` are always selected whole: that never raises an
outdegree, so only the "big" edges (size > ``L``) enter the optimization,
and each of them selects exactly ``L`` members.  A vertex ``v`` then has
outdegree ``deg_L(v) - (#big edges selecting v)``; bounding every outdegree
by ``t`` is a circulation problem with lower bounds on the vertex arcs.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .concept_class import Vector
from .flow import feasible_circulation


@dataclass(frozen=True)
class Edge:
    direction: int
    pattern: Vector  # labels on every coordinate except ``direction``
    members: tuple[int, ...]  # sorted vertex indices

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class OneInclusionGraph:
    vertices: tuple[Vector, ...]
    edges: tuple[Edge, ...]
    incidence: tuple[tuple[int, ...], ...]  # vertex -> incident edge indices

    @property
    def arity(self) -> int:
        return len(self.vertices[0]) if self.vertices else 0

    def vertex_index(self, v: Vector) -> int:
        try:
            return self.__dict__["_vidx"][tuple(v)]
        except KeyError:
            if "_vidx" not in self.__dict__:
                object.__setattr__(self, "_vidx", {u: i for i, u in enumerate(self.vertices)})
                return self.vertex_index(v)
            raise KeyError(f"{tuple(v)} is not a vertex") from None

    def edge_index(self, direction: int, pattern: Vector) -> Optional[int]:
        if "_eidx" not in self.__dict__:
            object.__setattr__(
                self, "_eidx", {(e.direction, e.pattern): j for j, e in enumerate(self.edges)}
            )
        return self.__dict__["_eidx"].get((direction, tuple(pattern)))


def build_graph(proj: Sequence[Vector]) -> OneInclusionGraph:
    vertices = tuple(sorted(set(tuple(v) for v in proj)))
    if not vertices:
        raise ValueError("the one-inclusion graph needs a nonempty class")
    m = len(vertices[0])
    groups: dict[tuple[int, Vector], list[int]] = {}
    for idx, v in enumerate(vertices):
        for i in range(m):
            groups.setdefault((i, v[:i] + v[i + 1:]), []).append(idx)
    edges = tuple(Edge(i, pat, tuple(mem)) for (i, pat), mem in sorted(groups.items()))
    inc: list[list[int]] = [[] for _ in vertices]
    for j, e in enumerate(edges):
        for u in e.members:
            inc[u].append(j)
    return OneInclusionGraph(vertices, edges, tuple(tuple(x) for x in inc))


def l_degree(graph: OneInclusionGraph, v, L: int) -> int:
    u = v if isinstance(v, int) else graph.vertex_index(v)
    return sum(1 for j in graph.incidence[u] if len(graph.edges[j]) > L)


def avg_l_degree(graph: OneInclusionGraph, L: int) -> Fraction:
    return Fraction(sum(len(e) for e in graph.edges if len(e) > L), len(graph.vertices))


@dataclass(frozen=True)
class ListOrientation:
    L: int
    selection: tuple[tuple[int, ...], ...]  # per edge, selected vertex indices (sorted)

    def validate(self, graph: OneInclusionGraph) -> None:
        if len(self.selection) != len(graph.edges):
            raise ValueError("orientation does not cover every edge")
        for e, sel in zip(graph.edges, self.selection):
            if len(sel) > self.L or len(set(sel)) != len(sel) or not set(sel) <= set(e.members):
                raise ValueError(f"invalid selection {sel} on edge {e}")

    def to_dict(self, graph: OneInclusionGraph) -> list[dict]:
        return [
            {
                "direction": e.direction,
                "pattern": list(e.pattern),
                "members": [list(graph.vertices[u]) for u in e.members],
                "selected": [list(graph.vertices[u]) for u in sel],
            }
            for e, sel in zip(graph.edges, self.selection)
        ]


def outdegree(graph: OneInclusionGraph, sigma: ListOrientation, v) -> int:
    sigma.validate(graph)
    u = v if isinstance(v, int) else graph.vertex_index(v)
    return sum(1 for j in graph.incidence[u] if u not in sigma.selection[j])


def max_outdegree(graph: OneInclusionGraph, sigma: ListOrientation) -> int:
    sigma.validate(graph)
    outs = [0] * len(graph.vertices)
    for e, sel in zip(graph.edges, sigma.selection):
        chosen = set(sel)
        for u in e.members:
            if u not in chosen:
                outs[u] += 1
    return max(outs)


# -- solver -----------------------------------------------------------------

def _big_edges(graph: OneInclusionGraph, L: int) -> list[int]:
    return [j for j, e in enumerate(graph.edges) if len(e) > L]


def _assemble(graph, L, chosen: dict[int, set[int]]) -> ListOrientation:
    sel = []
    for j, e in enumerate(graph.edges):
        sel.append(tuple(sorted(chosen[j])) if j in chosen else e.members)
    return ListOrientation(L, tuple(sel))


def _flow_selection(graph: OneInclusionGraph, L: int, t: int, big: list[int]) -> Optional[dict[int, set[int]]]:
    """Selections on big edges leaving every outdegree <= t, via a circulation."""
    nv = len(graph.vertices)
    deg = [0] * nv
    for j in big:
        for u in graph.edges[j].members:
            deg[u] += 1
    S, T = 0, 1
    enode = {j: 2 + k for k, j in enumerate(big)}
    vbase = 2 + len(big)
    arcs, pick = [], []
    for j in big:
        arcs.append((S, enode[j], L, L))
    for j in big:
        for u in graph.edges[j].members:
            pick.append((j, u, len(arcs)))
            arcs.append((enode[j], vbase + u, 0, 1))
    for u in range(nv):
        if deg[u]:
            arcs.append((vbase + u, T, max(0, deg[u] - t), deg[u]))
    arcs.append((T, S, 0, L * len(big)))
    flows = feasible_circulation(vbase + nv, arcs)
    if flows is None:
        return None
    chosen: dict[int, set[int]] = {j: set() for j in big}
    for j, u, a in pick:
        if flows[a]:
            chosen[j].add(u)
    return chosen


def feasible_orientation(graph: OneInclusionGraph, L: int, t: int) -> Optional[ListOrientation]:
    """Some orientation with maximum L-outdegree at most ``t``, if one exists."""
    if L < 1 or t < 0:
        raise ValueError("need L >= 1 and t >= 0")
    big = _big_edges(graph, L)
    chosen = _flow_selection(graph, L, t, big) if big else {}
    if chosen is None:
        return None
    return _assemble(graph, L, chosen)


def _canonicalize(graph, L, t, big, chosen):
    """Lexicographically smallest selections (edge order, then vertex order)
    among orientations with max outdegree <= t.

    Greedy over big edges and their members; whether a member can still be
    selected is decided exactly by a residual cycle through that arc.
    """
    nv = len(graph.vertices)
    deg = [0] * nv
    for j in big:
        for u in graph.edges[j].members:
            deg[u] += 1
    need = [max(0, d - t) for d in deg]
    cnt = [0] * nv
    sel_by: list[set[int]] = [set() for _ in range(nv)]  # big edges selecting u
    for j in big:
        for u in chosen[j]:
            cnt[u] += 1
            sel_by[u].add(j)
    fixed: set[tuple[int, int]] = set()
    HUB = ("T",)

    def find_path(v, target):
        # nodes: ("v", u) / ("e", j) / HUB ; returns list of nodes from v to ("e", target)
        start = ("v", v)
        prev = {start: None}
        dq = deque([start])
        while dq:
            node = dq.popleft()
            if node == ("e", target):
                path = []
                while node is not None:
                    path.append(node)
                    node = prev[node]
                return path[::-1]
            if node is HUB:
                nbrs = [("v", w) for w in range(nv) if cnt[w] > need[w]]
            elif node[0] == "v":
                u = node[1]
                nbrs = [("e", j) for j in sorted(sel_by[u]) if (j, u) not in fixed]
                if cnt[u] < deg[u]:
                    nbrs.append(HUB)
            else:
                j = node[1]
                nbrs = [("v", u) for u in graph.edges[j].members
                        if u not in chosen[j] and (j, u) not in fixed]
            for nb in nbrs:
                if nb not in prev:
                    prev[nb] = node
                    dq.append(nb)
        return None

    def select(j, u):
        chosen[j].add(u)
        sel_by[u].add(j)
        cnt[u] += 1

    def unselect(j, u):
        chosen[j].discard(u)
        sel_by[u].discard(j)
        cnt[u] -= 1

    for j in big:
        taken = 0
        for v in graph.edges[j].members:
            if taken == L:
                fixed.add((j, v))
                continue
            if v not in chosen[j]:
                path = find_path(v, j)
                if path is None:
                    fixed.add((j, v))
                    continue
                # rotate along the cycle j -> v -> ... -> j
                select(j, v)
                for a, b in zip(path, path[1:]):
                    if a[0] == "v" and b[0] == "e":
                        unselect(b[1], a[1])
                    elif a[0] == "e" and b[0] == "v":
                        select(a[1], b[1])
                    elif a is HUB:
                        pass  # hub arcs only move slack between vertices
            fixed.add((j, v))
            taken += 1
    return chosen


def min_max_outdegree_orientation(graph: OneInclusionGraph, L: int) -> tuple[ListOrientation, int]:
    """Exact minimizer of the maximum L-outdegree with a canonical tie-break."""
    if L < 1:
        raise ValueError("L must be >= 1")
    big = _big_edges(graph, L)
    if not big:
        return _assemble(graph, L, {}), 0
    deg = [0] * len(graph.vertices)
    for j in big:
        for u in graph.edges[j].members:
            deg[u] += 1
    lo, hi = 0, max(deg)
    best = None
    while lo < hi:
        mid = (lo + hi) // 2
        got = _flow_selection(graph, L, mid, big)
        if got is None:
            lo = mid + 1
        else:
            hi, best = mid, got
    if best is None or lo != hi:
        best = _flow_selection(graph, L, lo, big)
    chosen = _canonicalize(graph, L, lo, big, best)
    return _assemble(graph, L, chosen), lo
