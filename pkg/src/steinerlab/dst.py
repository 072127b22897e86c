"""Directed Steiner tree via the Dreyfus-Wagner subset DP, and the derived
2-approximation for SCSS (union of a forward and a reverse Steiner tree).

The DP runs over terminal subsets with shortest-path "metric closure"
relaxations: 3^k n^{O(1)} time, exact.  Witness arc sets are reconstructed
from DP back-pointers; a reconstructed set can only tie the DP value, never
beat it, so the weight assertion at the end is a genuine invariant.
"""
from __future__ import annotations

from heapq import heappop, heappush
from typing import Optional, Sequence

from .bnb import INFEASIBLE, OPTIMAL, SolveResult
from .graph import (
    EdgeSolution,
    GraphBuilder,
    ScssInstance,
    WeightedDigraph,
    strongly_connected_terminals,
    validate_scss,
)

_INF = float("inf")
MAX_TERMINALS = 20


def _dijkstra_with_parents(graph: WeightedDigraph, source: int):
    dist = [_INF] * graph.n
    parent_arc: list[Optional[int]] = [None] * graph.n
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue
        for aid in graph.out_arcs(u):
            _t, v, w = graph.arcs[aid]
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                parent_arc[v] = aid
                heappush(heap, (nd, v))
    return dist, parent_arc


def _path_arcs(graph: WeightedDigraph, parent_arc, source: int, target: int) -> set[int]:
    arcs: set[int] = set()
    v = target
    while v != source:
        aid = parent_arc[v]
        assert aid is not None
        arcs.add(aid)
        v = graph.tail(aid)
    return arcs


def dreyfus_wagner_dst(graph: WeightedDigraph, root: int,
                       terminals: Sequence[int]) -> SolveResult:
    """Minimum-weight arc set connecting ``root`` to every terminal."""
    terminals = tuple(dict.fromkeys(t for t in terminals if t != root))
    k = len(terminals)
    if k == 0:
        return SolveResult(OPTIMAL, 0, EdgeSolution.of(graph, ()))
    if k > MAX_TERMINALS:
        raise ValueError(f"Dreyfus-Wagner limited to {MAX_TERMINALS} terminals")

    n = graph.n
    dist = [None] * n
    parents = [None] * n
    for v in range(n):
        dist[v], parents[v] = _dijkstra_with_parents(graph, v)
    for t in terminals:
        if dist[root][t] == _INF:
            return SolveResult(INFEASIBLE, None, None)

    full = (1 << k) - 1
    # steiner[S][v]: optimal arborescence from v covering terminal set S.
    steiner = [[_INF] * n for _ in range(full + 1)]
    # choice[S][v]: ("leaf",) | ("via", u, S) | ("split", S1) describing how
    # the optimum at (S, v) decomposes; "via" nodes split at u.
    choice: list[list[Optional[tuple]]] = [[None] * n for _ in range(full + 1)]

    for idx, t in enumerate(terminals):
        mask = 1 << idx
        for v in range(n):
            steiner[mask][v] = dist[v][t]
            choice[mask][v] = ("leaf", t)

    for S in range(1, full + 1):
        if S & (S - 1) == 0:
            continue
        tmp = [_INF] * n
        tmp_choice: list[Optional[tuple]] = [None] * n
        sub = (S - 1) & S
        while sub:
            comp = S & ~sub
            if sub < comp:  # each unordered split once
                for v in range(n):
                    cand = steiner[sub][v] + steiner[comp][v]
                    if cand < tmp[v]:
                        tmp[v] = cand
                        tmp_choice[v] = ("split", sub)
            sub = (sub - 1) & S
        row = steiner[S]
        ch = choice[S]
        for v in range(n):
            dv = dist[v]
            best = _INF
            best_u = -1
            for u in range(n):
                if tmp[u] == _INF:
                    continue
                cand = dv[u] + tmp[u]
                if cand < best:
                    best = cand
                    best_u = u
            row[v] = best
            if best_u >= 0:
                ch[v] = ("via", best_u, tmp_choice[best_u])

    value = steiner[full][root]
    assert value != _INF

    arcs: set[int] = set()

    def rebuild(S: int, v: int) -> None:
        c = choice[S][v]
        assert c is not None
        if c[0] == "leaf":
            arcs.update(_path_arcs(graph, parents[v], v, c[1]))
            return
        _tag, u, split = c
        arcs.update(_path_arcs(graph, parents[v], v, u))
        sub = split[1]
        rebuild(sub, u)
        rebuild(S & ~sub, u)

    rebuild(full, root)
    sol = EdgeSolution.of(graph, arcs)
    assert sol.weight == value, "witness weight must equal the DP optimum"
    return SolveResult(OPTIMAL, int(value), sol)


def reverse_graph(graph: WeightedDigraph) -> WeightedDigraph:
    """Arc-reversed copy; arc ids are preserved positionally."""
    bld = GraphBuilder()
    for v in range(graph.n):
        bld.add_vertex(graph.label(v))
    for (t, h, w) in graph.arcs:
        bld.add_arc(h, t, w)
    return bld.freeze()


def scss_two_approx(instance: ScssInstance, root: Optional[int] = None) -> SolveResult:
    """Union of DST(G, r, T\\r) and DST(G_rev, r, T\\r): weight <= 2 OPT."""
    if root is None:
        root = instance.terminals[0]
    if root not in instance.terminals:
        raise ValueError("root must be a terminal")
    if not strongly_connected_terminals(instance.graph, instance.terminals):
        return SolveResult(INFEASIBLE, None, None)
    others = [t for t in instance.terminals if t != root]
    fwd = dreyfus_wagner_dst(instance.graph, root, others)
    rev = dreyfus_wagner_dst(reverse_graph(instance.graph), root, others)
    assert fwd.status == OPTIMAL and rev.status == OPTIMAL
    arcs = set(fwd.solution.arcs) | set(rev.solution.arcs)
    sol = EdgeSolution.of(instance.graph, arcs)
    assert validate_scss(instance, sol)
    return SolveResult("feasible", sol.weight, sol)
