"""Exact branch-and-bound solver for DSN / SCSS over arc inclusion.

Complete search: branch on the undecided arcs crossing the frontier of the
reachable-from-source region of a hardest unsatisfied demand (any feasible
completion must pick one of them), with sequential exclusion so branches
partition the space.  Admissible lower bound: committed weight plus the
maximum over unsatisfied demands of a shortest-path cost in which committed
arcs are free and excluded arcs are gone.  A per-source / per-target
additive bound (out-arc sets of distinct vertices are disjoint) is taken
into the max as well.

SCSS reduces to DSN through a hub: all terminals mutually reach each other
iff every terminal reaches t_1 and t_1 reaches every terminal.

Zero-weight arcs are committed up front; they can only help and never
change the optimal weight, so witnesses may carry harmless zero-weight
extras (minimalization lives in the structure module).

Timeouts are reported as their own status, never silently downgraded to a
heuristic answer.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Iterable, Optional, Sequence

from .graph import (
    DsnInstance,
    EdgeSolution,
    GraphError,
    ScssInstance,
    WeightedDigraph,
    validate_dsn,
    validate_scss,
)

UNDECIDED, INCLUDED, EXCLUDED = 0, 1, 2

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIMEOUT = "timeout"
DECISION_YES = "yes"
DECISION_NO = "no"

_INF = float("inf")


@dataclass
class SolveResult:
    """Outcome of a solver run.

    ``optimal`` is True only when the full search space was exhausted; with
    ``budget_only`` the status is a decision (yes/no) instead.  ``optima``
    carries every distinct optimum discovered when requested.
    """

    status: str
    weight: Optional[int]
    solution: Optional[EdgeSolution]
    nodes_explored: int = 0
    root_lower_bound: Optional[int] = None
    optima: tuple[EdgeSolution, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Timeout(Exception):
    pass


class _BnB:
    def __init__(self, graph: WeightedDigraph, demands: Sequence[tuple[int, int]],
                 deadline: Optional[float]):
        self.g = graph
        self.demands = [d for d in dict.fromkeys(demands) if d[0] != d[1]]
        self.deadline = deadline
        n = graph.n
        arcs = graph.arcs
        self.tails = [a[0] for a in arcs]
        self.heads = [a[1] for a in arcs]
        self.weights = [a[2] for a in arcs]
        self.out_adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        self.in_adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for aid, (t, h, w) in enumerate(arcs):
            self.out_adj[t].append((h, aid, w))
            self.in_adj[h].append((t, aid, w))
        self.state = bytearray(len(arcs))
        self.included_cost = 0
        for aid, w in enumerate(self.weights):
            if w == 0:
                self.state[aid] = INCLUDED
        self.nodes = 0
        self.best_weight: float = _INF
        self.best_witness: Optional[frozenset[int]] = None
        self.optima: list[frozenset[int]] = []
        self.collect_optima = False
        self.budget: Optional[int] = None
        self.decision_witness: Optional[frozenset[int]] = None

    # -- reachability / bounds -------------------------------------------

    def _reach_included(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        state = self.state
        out = self.out_adj
        while stack:
            u = stack.pop()
            for (v, aid, _w) in out[u]:
                if state[aid] == INCLUDED and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    def _unsatisfied(self):
        cache: dict[int, set[int]] = {}
        unsat = []
        for (s, t) in self.demands:
            reach = cache.get(s)
            if reach is None:
                reach = self._reach_included(s)
                cache[s] = reach
            if t not in reach:
                unsat.append((s, t))
        return unsat

    def _dist_to_target(self, t: int) -> list[float]:
        """Reverse Dijkstra from t; committed arcs free, excluded removed."""
        dist = [_INF] * self.g.n
        dist[t] = 0
        heap = [(0, t)]
        state = self.state
        in_adj = self.in_adj
        while heap:
            d, v = heappop(heap)
            if d > dist[v]:
                continue
            for (u, aid, w) in in_adj[v]:
                st = state[aid]
                if st == EXCLUDED:
                    continue
                nd = d if st == INCLUDED else d + w
                if nd < dist[u]:
                    dist[u] = nd
                    heappush(heap, (nd, u))
        return dist

    def _dual_ascent(self, unsat, cap: float):
        """Admissible cut-packing bound (Wong-style dual ascent).

        For each unsatisfied demand, grow the set of vertices that reach the
        target through residual-zero arcs; each growth step raises the bound
        by the smallest residual on the incoming cut and subtracts it from
        every cut arc.  The subtractions keep the cut packing dual-feasible,
        so the total raised never exceeds the cost of any feasible
        completion.  Returns (bound, per-demand contributions); stops early
        once ``cap`` is crossed.
        """
        state = self.state
        in_adj = self.in_adj
        residual = [w if state[a] == UNDECIDED else 0
                    for a, w in enumerate(self.weights)]
        n = self.g.n
        lb = 0
        contributions = []
        for (s, t) in unsat:
            raised = 0
            while True:
                in_s = bytearray(n)
                in_s[t] = 1
                stack = [t]
                while stack:
                    v = stack.pop()
                    for (u, aid, _w) in in_adj[v]:
                        if not in_s[u] and state[aid] != EXCLUDED \
                                and residual[aid] == 0:
                            in_s[u] = 1
                            stack.append(u)
                if in_s[s]:
                    break
                delta = _INF
                cut = []
                for v in range(n):
                    if not in_s[v]:
                        continue
                    for (u, aid, _w) in in_adj[v]:
                        if in_s[u] or state[aid] == EXCLUDED:
                            continue
                        r = residual[aid]
                        if r < delta:
                            delta = r
                        cut.append(aid)
                if not cut:
                    return _INF, contributions
                raised += delta
                lb += delta
                if lb > cap:
                    contributions.append(((s, t), raised))
                    return lb, contributions
                for aid in cut:
                    residual[aid] -= delta
            contributions.append(((s, t), raised))
        return lb, contributions

    def _additive_bound(self, unsat) -> int:
        out_sum = 0
        in_sum = 0
        state = self.state
        for s in {s for (s, _t) in unsat}:
            best = _INF
            for (_v, aid, w) in self.out_adj[s]:
                st = state[aid]
                if st == INCLUDED:
                    best = 0
                    break
                if st == UNDECIDED and w < best:
                    best = w
            if best is not _INF:
                out_sum += best
        for t in {t for (_s, t) in unsat}:
            best = _INF
            for (_u, aid, w) in self.in_adj[t]:
                st = state[aid]
                if st == INCLUDED:
                    best = 0
                    break
                if st == UNDECIDED and w < best:
                    best = w
            if best is not _INF:
                in_sum += best
        return max(out_sum, in_sum)

    # -- search ------------------------------------------------------------

    def _prune_limit(self) -> float:
        if self.budget is not None:
            return self.budget
        return self.best_weight

    def _record_complete(self):
        cost = self.included_cost
        witness = frozenset(a for a in range(len(self.state))
                            if self.state[a] == INCLUDED)
        if self.budget is not None:
            if cost <= self.budget:
                self.decision_witness = witness
            return
        if cost < self.best_weight:
            self.best_weight = cost
            self.best_witness = witness
            self.optima = [witness]
        elif cost == self.best_weight:
            if self.best_witness is None:
                self.best_witness = witness
            if self.collect_optima and witness not in self.optima:
                self.optima.append(witness)

    def _search(self) -> None:
        self.nodes += 1
        if self.deadline is not None and self.nodes % 128 == 0:
            if time.monotonic() > self.deadline:
                raise _Timeout
        unsat = self._unsatisfied()
        if not unsat:
            self._record_complete()
            return
        limit = self._prune_limit()
        if self.included_cost > limit:
            return
        lb_quick = self._additive_bound(unsat)
        if self.included_cost + lb_quick > limit:
            return
        cap = limit - self.included_cost
        lb_extra, contributions = self._dual_ascent(unsat, cap)
        lb = self.included_cost + lb_extra
        if lb > limit:
            return
        if self.budget is None and lb == limit and not self.collect_optima \
                and self.best_witness is not None:
            return
        # Branch on the demand that contributed most to the bound.
        best_demand = max(contributions, key=lambda c: c[1])[0] \
            if contributions else unsat[0]
        s, t = best_demand
        best_dist_map = self._dist_to_target(t)
        if best_dist_map[s] == _INF:
            return
        region = self._reach_included(s)
        state = self.state
        candidates = []
        for u in region:
            for (v, aid, w) in self.out_adj[u]:
                if state[aid] == UNDECIDED and v not in region \
                        and best_dist_map[v] != _INF:
                    candidates.append((w + best_dist_map[v], aid, w))
        if not candidates:
            return
        candidates.sort()
        excluded_here = []
        try:
            for (_key, aid, w) in candidates:
                state[aid] = INCLUDED
                self.included_cost += w
                self._search()
                self.included_cost -= w
                state[aid] = EXCLUDED
                excluded_here.append(aid)
                if self.budget is not None and self.decision_witness is not None:
                    return
        finally:
            for aid in excluded_here:
                state[aid] = UNDECIDED

    def run(self, *, budget_only: Optional[int] = None,
            upper_bound: Optional[int] = None,
            seed_solution: Optional[Iterable[int]] = None,
            collect_optima: bool = False) -> SolveResult:
        self.collect_optima = collect_optima
        self.budget = budget_only
        # Feasibility in the full graph.
        for (s, t) in self.demands:
            dist = self._dist_to_target(t)
            if dist[s] == _INF:
                return SolveResult(INFEASIBLE, None, None, nodes_explored=0)
        if budget_only is None:
            if upper_bound is not None:
                self.best_weight = upper_bound
            if seed_solution is not None:
                arcs = frozenset(seed_solution) | frozenset(
                    a for a in range(len(self.state)) if self.weights[a] == 0)
                cost = sum(self.weights[a] for a in arcs)
                if cost <= self.best_weight:
                    self.best_weight = cost
                    self.best_witness = arcs
                    self.optima = [arcs]
        unsat0 = self._unsatisfied()
        root_lb = self.included_cost
        if unsat0:
            extra, _contrib = self._dual_ascent(unsat0, _INF)
            quick = self._additive_bound(unsat0)
            root_lb += int(max(extra, quick)) if extra != _INF else quick
        try:
            self._search()
        except _Timeout:
            return SolveResult(TIMEOUT, None, None, nodes_explored=self.nodes,
                               root_lower_bound=root_lb)
        if budget_only is not None:
            if self.decision_witness is not None:
                sol = EdgeSolution.of(self.g, self.decision_witness)
                return SolveResult(DECISION_YES, sol.weight, sol,
                                   nodes_explored=self.nodes,
                                   root_lower_bound=root_lb)
            return SolveResult(DECISION_NO, None, None,
                               nodes_explored=self.nodes, root_lower_bound=root_lb)
        if self.best_witness is None:
            return SolveResult(INFEASIBLE, None, None, nodes_explored=self.nodes,
                               root_lower_bound=root_lb)
        assert root_lb <= self.best_weight, "admissibility violated"
        sol = EdgeSolution.of(self.g, self.best_witness)
        optima = tuple(EdgeSolution.of(self.g, o) for o in self.optima) \
            if collect_optima else ()
        return SolveResult(OPTIMAL, int(self.best_weight), sol,
                           nodes_explored=self.nodes, root_lower_bound=root_lb,
                           optima=optima)


def solve_dsn_arcs(graph: WeightedDigraph, demands: Sequence[tuple[int, int]],
                   *, budget_only: Optional[int] = None,
                   upper_bound: Optional[int] = None,
                   seed_solution: Optional[Iterable[int]] = None,
                   collect_optima: bool = False,
                   timeout: Optional[float] = None) -> SolveResult:
    deadline = time.monotonic() + timeout if timeout is not None else None
    engine = _BnB(graph, demands, deadline)
    return engine.run(budget_only=budget_only, upper_bound=upper_bound,
                      seed_solution=seed_solution, collect_optima=collect_optima)


def exact_dsn(instance: DsnInstance, *, upper_bound: Optional[int] = None,
              budget_only: Optional[int] = None,
              timeout: Optional[float] = None,
              collect_optima: bool = False,
              seed_solution: Optional[Iterable[int]] = None) -> SolveResult:
    """Optimal DSN weight (and a witness), or the decision at ``budget_only``."""
    res = solve_dsn_arcs(instance.graph, instance.demands,
                         budget_only=budget_only, upper_bound=upper_bound,
                         seed_solution=seed_solution,
                         collect_optima=collect_optima, timeout=timeout)
    if res.solution is not None:
        assert validate_dsn(instance, res.solution)
    return res


def scss_demands(terminals: Sequence[int]) -> list[tuple[int, int]]:
    """Hub demands: strong connectivity of T == everyone reaches/is reached
    by t_1 (paths compose through the hub)."""
    hub = terminals[0]
    demands = []
    for t in terminals[1:]:
        demands.append((hub, t))
        demands.append((t, hub))
    return demands


def exact_scss(instance: ScssInstance, *, upper_bound: Optional[int] = None,
               budget_only: Optional[int] = None,
               timeout: Optional[float] = None,
               collect_optima: bool = False,
               seed_solution: Optional[Iterable[int]] = None) -> SolveResult:
    """Optimal SCSS weight via the hub-demand reduction to DSN search."""
    if instance.k == 1:
        sol = EdgeSolution.of(instance.graph, ())
        if budget_only is not None:
            return SolveResult(DECISION_YES if budget_only >= 0 else DECISION_NO,
                               0, sol)
        return SolveResult(OPTIMAL, 0, sol, root_lower_bound=0)
    res = solve_dsn_arcs(instance.graph, scss_demands(instance.terminals),
                         budget_only=budget_only, upper_bound=upper_bound,
                         seed_solution=seed_solution,
                         collect_optima=collect_optima, timeout=timeout)
    if res.solution is not None:
        assert validate_scss(instance, res.solution)
    return res


def exhaustive_scss(instance: ScssInstance) -> SolveResult:
    """Independent oracle: try all 2^m arc subsets (m small)."""
    g = instance.graph
    m = len(g.arcs)
    if m > 16:
        raise GraphError("exhaustive oracle limited to 16 arcs")
    best: Optional[int] = None
    witness: Optional[frozenset[int]] = None
    for mask in range(1 << m):
        arcs = frozenset(a for a in range(m) if mask >> a & 1)
        sol = EdgeSolution.of(g, arcs)
        if best is not None and sol.weight >= best:
            continue
        if validate_scss(instance, sol):
            best = sol.weight
            witness = arcs
    if best is None:
        return SolveResult(INFEASIBLE, None, None)
    return SolveResult(OPTIMAL, best, EdgeSolution.of(g, witness))


def exhaustive_dst(graph: WeightedDigraph, root: int,
                   terminals: Sequence[int]) -> SolveResult:
    """Brute force directed Steiner tree: all arc subsets, reachability check."""
    from .graph import reachable_set

    m = len(graph.arcs)
    if m > 16:
        raise GraphError("exhaustive oracle limited to 16 arcs")
    need = set(terminals)
    best: Optional[int] = None
    witness: Optional[frozenset[int]] = None
    for mask in range(1 << m):
        arcs = frozenset(a for a in range(m) if mask >> a & 1)
        weight = graph.total_weight(arcs)
        if best is not None and weight >= best:
            continue
        if need <= reachable_set(graph, arcs, root):
            best = weight
            witness = arcs
    if best is None:
        return SolveResult(INFEASIBLE, None, None)
    return SolveResult(OPTIMAL, best, EdgeSolution.of(graph, witness))
