"""Weight-model transformations and the vertex-based decision solver.

``vertexize`` rewrites an edge-weighted instance as a vertex-unweighted one
by replacing each weight-w arc with n*w internal chain vertices (none for
zero weight); a weight-C edge solution corresponds to a C*n + n vertex
solution.  ``split_vertex_weights`` goes the other way for vertex-weighted
inputs: subdivide every arc with a weight-0 dummy, then split each
non-terminal u into u- / u+ joined by an arc carrying u's weight.

The vertex solver is an independent branch-and-bound over vertex inclusion
with induced-subgraph reachability, used as the second oracle in the
equivalence tests.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Optional, Sequence, Union

from .bnb import DECISION_NO, DECISION_YES, INFEASIBLE, OPTIMAL, TIMEOUT, SolveResult
from .graph import (
    DsnInstance,
    GraphBuilder,
    GraphError,
    ScssInstance,
    WeightedDigraph,
)

_INF = float("inf")


def vertexize(instance: Union[ScssInstance, DsnInstance], budget: int):
    """Edge-weighted instance -> vertex-unweighted instance.

    Returns (instance', vertex budget C*n + n) where n = |V| of the source
    graph.  Arc weights in the produced graph are all zero: weight now lives
    in vertex counting.
    """
    g = instance.graph
    n = g.n
    bld = GraphBuilder()
    for v in range(n):
        bld.add_vertex(g.label(v))
    for aid, (t, h, w) in enumerate(g.arcs):
        if w == 0:
            bld.add_arc(t, h, 0)
            continue
        prev = t
        for step in range(n * w):
            mid = bld.add_vertex(f"arc{aid}.{step}")
            bld.add_arc(prev, mid, 0)
            prev = mid
        bld.add_arc(prev, h, 0)
    graph2 = bld.freeze()
    if isinstance(instance, ScssInstance):
        inst2 = ScssInstance(graph2, instance.terminals)
    else:
        inst2 = DsnInstance(graph2, instance.demands)
    return inst2, budget * n + n


@dataclass(frozen=True)
class VertexWeightedScss:
    """SCSS with weights on vertices; terminals are unweighted (weight 0)."""

    graph: WeightedDigraph
    terminals: tuple[int, ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != self.graph.n:
            raise GraphError("one weight per vertex required")
        if any(w < 0 for w in self.weights):
            raise GraphError("vertex weights must be nonnegative")


def split_vertex_weights(instance: VertexWeightedScss):
    """Vertex-weighted SCSS -> edge-weighted SCSS with equal optima.

    Every arc is first subdivided by a weight-0 dummy vertex; every
    non-terminal u (dummies included) then becomes u-/u+ with an arc of u's
    weight between them, in-arcs entering u- and out-arcs leaving u+.  All
    connecting arcs weigh zero.  Returns (ScssInstance, vertex -> (in id,
    out id) map over original vertices).
    """
    g = instance.graph
    terminals = set(instance.terminals)
    bld = GraphBuilder()
    vmap: dict[int, tuple[int, int]] = {}
    for v in range(g.n):
        if v in terminals:
            vid = bld.add_vertex(g.label(v))
            vmap[v] = (vid, vid)
        else:
            vin = bld.add_vertex(f"{g.label(v) or v}-")
            vout = bld.add_vertex(f"{g.label(v) or v}+")
            bld.add_arc(vin, vout, instance.weights[v])
            vmap[v] = (vin, vout)
    for (t, h, _w) in g.arcs:
        din = bld.add_vertex(None)
        dout = bld.add_vertex(None)
        bld.add_arc(din, dout, 0)  # dummy subdivision vertex, weight 0
        bld.add_arc(vmap[t][1], din, 0)
        bld.add_arc(dout, vmap[h][0], 0)
    graph2 = bld.freeze()
    inst2 = ScssInstance(graph2, tuple(vmap[t][0] for t in instance.terminals))
    return inst2, vmap


class _VertexBnB:
    """Branch-and-bound over vertex inclusion (induced reachability)."""

    UNDECIDED, INCLUDED, EXCLUDED = 0, 1, 2

    def __init__(self, graph: WeightedDigraph, demands, weights,
                 deadline: Optional[float]):
        self.g = graph
        self.demands = [d for d in dict.fromkeys(demands) if d[0] != d[1]]
        self.weights = list(weights)
        self.deadline = deadline
        self.out_nbrs: list[list[int]] = [[] for _ in range(graph.n)]
        self.in_nbrs: list[list[int]] = [[] for _ in range(graph.n)]
        for (t, h, _w) in graph.arcs:
            if t != h:
                self.out_nbrs[t].append(h)
                self.in_nbrs[h].append(t)
        self.state = bytearray(graph.n)
        self.cost = 0
        self.nodes = 0
        self.best: float = _INF
        self.best_set: Optional[frozenset[int]] = None
        self.budget: Optional[int] = None
        self.decision_set: Optional[frozenset[int]] = None

    def _include(self, v: int):
        self.state[v] = self.INCLUDED
        self.cost += self.weights[v]

    def _reach(self, s: int) -> set[int]:
        if self.state[s] != self.INCLUDED:
            return set()
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in self.out_nbrs[u]:
                if self.state[v] == self.INCLUDED and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    def _unsat(self):
        cache = {}
        out = []
        for (s, t) in self.demands:
            r = cache.get(s)
            if r is None:
                r = self._reach(s)
                cache[s] = r
            if t not in r:
                out.append((s, t))
        return out

    def _dist(self, t: int):
        """Node-weighted reverse Dijkstra: cost of still-needed vertices."""
        dist = [_INF] * self.g.n
        if self.state[t] == self.EXCLUDED:
            return dist
        dist[t] = 0 if self.state[t] == self.INCLUDED else self.weights[t]
        heap = [(dist[t], t)]
        while heap:
            d, v = heappop(heap)
            if d > dist[v]:
                continue
            for u in self.in_nbrs[v]:
                st = self.state[u]
                if st == self.EXCLUDED:
                    continue
                nd = d + (0 if st == self.INCLUDED else self.weights[u])
                if nd < dist[u]:
                    dist[u] = nd
                    heappush(heap, (nd, u))
        return dist

    def _limit(self):
        return self.budget if self.budget is not None else self.best

    def _search(self):
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0 \
                and time.monotonic() > self.deadline:
            raise TimeoutError
        unsat = self._unsat()
        if not unsat:
            if self.budget is not None:
                if self.cost <= self.budget:
                    self.decision_set = frozenset(
                        v for v in range(self.g.n)
                        if self.state[v] == self.INCLUDED)
                return
            if self.cost < self.best:
                self.best = self.cost
                self.best_set = frozenset(
                    v for v in range(self.g.n)
                    if self.state[v] == self.INCLUDED)
            return
        limit = self._limit()
        if self.cost > limit:
            return
        best_demand, best_dist, lb_extra = None, None, 0
        for (s, t) in unsat:
            dist = self._dist(t)
            d = dist[s]
            if d > lb_extra:
                lb_extra, best_demand, best_dist = d, (s, t), dist
            if self.cost + lb_extra > limit:
                return
        lb = self.cost + lb_extra
        if lb > limit:
            return
        if self.budget is None and lb == limit and self.best_set is not None:
            return
        s, t = best_demand
        region = self._reach(s)
        candidates = []
        for u in region:
            for v in self.out_nbrs[u]:
                if self.state[v] == self.UNDECIDED and v not in region \
                        and best_dist[v] != _INF:
                    candidates.append((best_dist[v], v))
        if not candidates:
            return
        candidates.sort()
        seen = set()
        excluded_here = []
        try:
            for (_key, v) in candidates:
                if v in seen:
                    continue
                seen.add(v)
                self._include(v)
                self._search()
                self.cost -= self.weights[v]
                self.state[v] = self.EXCLUDED
                excluded_here.append(v)
                if self.budget is not None and self.decision_set is not None:
                    return
        finally:
            for v in excluded_here:
                self.state[v] = self.UNDECIDED

    def run(self, *, budget_only=None) -> SolveResult:
        self.budget = budget_only
        for (s, t) in self.demands:
            if self._full_dist_check(s, t):
                return SolveResult(INFEASIBLE, None, None)
        try:
            self._search()
        except TimeoutError:
            return SolveResult(TIMEOUT, None, None, nodes_explored=self.nodes)
        if self.budget is not None:
            if self.decision_set is not None:
                return SolveResult(DECISION_YES,
                                   sum(self.weights[v] for v in self.decision_set),
                                   None, nodes_explored=self.nodes)
            return SolveResult(DECISION_NO, None, None, nodes_explored=self.nodes)
        if self.best_set is None:
            return SolveResult(INFEASIBLE, None, None, nodes_explored=self.nodes)
        return SolveResult(OPTIMAL, int(self.best), None,
                           nodes_explored=self.nodes)

    def _full_dist_check(self, s, t) -> bool:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            if u == t:
                return False
            for v in self.out_nbrs[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return t not in seen


def _prepare_vertex_solver(graph, demands, terminals, weights, timeout):
    deadline = time.monotonic() + timeout if timeout is not None else None
    if weights is None:
        weights = [1] * graph.n
    engine = _VertexBnB(graph, demands, weights, deadline)
    for t in terminals:
        engine._include(t)
    return engine


def solve_vertex_scss(instance: Union[ScssInstance, VertexWeightedScss],
                      *, budget_only: Optional[int] = None,
                      weights: Optional[Sequence[int]] = None,
                      timeout: Optional[float] = None) -> SolveResult:
    """Vertex-counting (or vertex-weighted) SCSS over induced subgraphs.

    The reported weight includes the pre-included terminals' weights.
    """
    if isinstance(instance, VertexWeightedScss) and weights is None:
        weights = instance.weights
    from .bnb import scss_demands

    demands = scss_demands(instance.terminals) if len(instance.terminals) > 1 else []
    engine = _prepare_vertex_solver(instance.graph, demands,
                                    instance.terminals, weights, timeout)
    if not demands:
        cost = engine.cost
        if budget_only is not None:
            return SolveResult(DECISION_YES if cost <= budget_only else DECISION_NO,
                               cost, None)
        return SolveResult(OPTIMAL, cost, None)
    return engine.run(budget_only=budget_only)


def solve_vertex_dsn(instance: DsnInstance, *, budget_only: Optional[int] = None,
                     weights: Optional[Sequence[int]] = None,
                     timeout: Optional[float] = None) -> SolveResult:
    endpoints = tuple(dict.fromkeys(
        v for d in instance.demands for v in d))
    engine = _prepare_vertex_solver(instance.graph, instance.demands,
                                    endpoints, weights, timeout)
    return engine.run(budget_only=budget_only)
