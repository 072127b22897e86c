"""Weighted directed multigraph core: graphs, instances, solutions, validation.

Vertices are dense integer ids handed out by :class:`GraphBuilder`; optional
string labels record provenance (e.g. the grid coordinate of a gadget vertex).
Graphs are immutable once frozen and safe to share across threads; all
mutation happens inside builders.  Arc weights are nonnegative integers and
zero-weight arcs are first-class citizens: the reductions rely on them.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

MAX_WEIGHT = 2**63 - 1


class GraphError(ValueError):
    """Malformed graph, instance or solution."""


class GraphBuilder:
    """Accumulates vertices and arcs, then freezes into a WeightedDigraph."""

    def __init__(self) -> None:
        self._n = 0
        self._labels: dict[int, str] = {}
        self._arcs: list[tuple[int, int, int]] = []

    @property
    def vertex_count(self) -> int:
        return self._n

    @property
    def arc_count(self) -> int:
        return len(self._arcs)

    def add_vertex(self, label: Optional[str] = None) -> int:
        vid = self._n
        self._n += 1
        if label is not None:
            self._labels[vid] = label
        return vid

    def add_arc(self, tail: int, head: int, weight: int) -> int:
        if not (0 <= tail < self._n and 0 <= head < self._n):
            raise GraphError(f"arc ({tail},{head}) references undeclared vertex")
        if not isinstance(weight, int) or isinstance(weight, bool):
            raise GraphError(f"arc weight {weight!r} is not an integer")
        if weight < 0:
            raise GraphError(f"negative arc weight {weight}")
        if weight > MAX_WEIGHT:
            raise GraphError(f"arc weight {weight} exceeds 2^63-1")
        self._arcs.append((tail, head, weight))
        return len(self._arcs) - 1

    def freeze(self) -> "WeightedDigraph":
        return WeightedDigraph(self._n, tuple(self._arcs), dict(self._labels))


class WeightedDigraph:
    """Immutable directed multigraph with nonnegative integer arc weights.

    Parallel arcs and self-loops are representable (the treewidth-2 reducer
    and some generators produce them); gadget builders never emit self-loops.
    """

    __slots__ = ("n", "arcs", "labels", "_out", "_in", "_label_index")

    def __init__(self, n: int, arcs: tuple[tuple[int, int, int], ...],
                 labels: dict[int, str]):
        self.n = n
        self.arcs = arcs
        self.labels = labels
        out: list[list[int]] = [[] for _ in range(n)]
        inn: list[list[int]] = [[] for _ in range(n)]
        for aid, (t, h, w) in enumerate(arcs):
            if not (0 <= t < n and 0 <= h < n):
                raise GraphError(f"arc {aid} endpoint not a declared vertex")
            if w < 0:
                raise GraphError(f"arc {aid} has negative weight")
            out[t].append(aid)
            inn[h].append(aid)
        self._out = tuple(tuple(a) for a in out)
        self._in = tuple(tuple(a) for a in inn)
        self._label_index: Optional[dict[str, int]] = None

    def out_arcs(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_arcs(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def tail(self, a: int) -> int:
        return self.arcs[a][0]

    def head(self, a: int) -> int:
        return self.arcs[a][1]

    def weight(self, a: int) -> int:
        return self.arcs[a][2]

    def total_weight(self, arcs: Iterable[int]) -> int:
        return sum(self.arcs[a][2] for a in arcs)

    def label(self, v: int) -> Optional[str]:
        return self.labels.get(v)

    def vertex_by_label(self, label: str) -> int:
        if self._label_index is None:
            self._label_index = {lab: v for v, lab in self.labels.items()}
        return self._label_index[label]

    def undirected_simple_edges(self) -> set[frozenset[int]]:
        """Underlying simple undirected edge set; self-loops dropped."""
        return {frozenset((t, h)) for (t, h, _w) in self.arcs if t != h}

    def vertices(self) -> range:
        return range(self.n)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"WeightedDigraph(n={self.n}, m={len(self.arcs)})"


@dataclass(frozen=True)
class EdgeSolution:
    """A set of arc references into a host graph, with cached total weight."""

    host: WeightedDigraph
    arcs: frozenset[int]
    weight: int

    @staticmethod
    def of(host: WeightedDigraph, arcs: Iterable[int]) -> "EdgeSolution":
        arcset = frozenset(arcs)
        for a in arcset:
            if not (0 <= a < len(host.arcs)):
                raise GraphError(f"arc id {a} not in host graph")
        return EdgeSolution(host, arcset, host.total_weight(arcset))

    def __post_init__(self) -> None:
        if self.weight != self.host.total_weight(self.arcs):
            raise GraphError("cached weight does not match member arc weights")

    def __contains__(self, a: int) -> bool:
        return a in self.arcs

    def __len__(self) -> int:
        return len(self.arcs)

    def __iter__(self) -> Iterator[int]:
        return iter(self.arcs)

    def union(self, other: "EdgeSolution") -> "EdgeSolution":
        if other.host is not self.host:
            raise GraphError("cannot union solutions over different hosts")
        return EdgeSolution.of(self.host, self.arcs | other.arcs)

    def restrict(self, arcs: Iterable[int]) -> "EdgeSolution":
        return EdgeSolution.of(self.host, self.arcs & frozenset(arcs))


@dataclass(frozen=True)
class ScssInstance:
    """Graph plus an ordered list of distinct terminals."""

    graph: WeightedDigraph
    terminals: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.terminals) < 1:
            raise GraphError("SCSS instance needs at least one terminal")
        if len(set(self.terminals)) != len(self.terminals):
            raise GraphError("duplicate terminal")
        for t in self.terminals:
            if not (0 <= t < self.graph.n):
                raise GraphError(f"terminal {t} not in graph")

    @property
    def k(self) -> int:
        return len(self.terminals)


@dataclass(frozen=True)
class DsnInstance:
    """Graph plus ordered demand pairs (s_i, t_i)."""

    graph: WeightedDigraph
    demands: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.demands) < 1:
            raise GraphError("DSN instance needs at least one demand")
        for s, t in self.demands:
            if not (0 <= s < self.graph.n and 0 <= t < self.graph.n):
                raise GraphError(f"demand ({s},{t}) endpoint not in graph")

    @property
    def k(self) -> int:
        return len(self.demands)


def _allowed_adjacency(graph: WeightedDigraph, allowed: Iterable[int]) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {}
    for a in allowed:
        t, h, _ = graph.arcs[a]
        adj.setdefault(t, []).append(h)
    return adj


def reachable_set(graph: WeightedDigraph, allowed: Iterable[int], source: int) -> set[int]:
    """All vertices reachable from ``source`` using only ``allowed`` arcs."""
    if not (0 <= source < graph.n):
        raise GraphError(f"unknown vertex id {source}")
    adj = _allowed_adjacency(graph, allowed)
    seen = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def reachable(graph: WeightedDigraph, allowed: EdgeSolution | Iterable[int],
              u: int, v: int) -> bool:
    """True iff a directed u->v path exists using only arcs in ``allowed``.

    ``u == v`` counts as reachable via the empty path.
    """
    if not (0 <= u < graph.n and 0 <= v < graph.n):
        raise GraphError(f"unknown vertex id {(u, v)}")
    if u == v:
        return True
    return v in reachable_set(graph, allowed, u)


def _check_host(instance_graph: WeightedDigraph, sol: EdgeSolution) -> None:
    if sol.host is not instance_graph:
        raise GraphError("solution arcs do not belong to the instance graph")


def validate_scss(instance: ScssInstance, sol: EdgeSolution) -> bool:
    """True iff sol connects every ordered terminal pair (t_i, t_j), i != j."""
    _check_host(instance.graph, sol)
    terms = instance.terminals
    if len(terms) <= 1:
        return True
    need = set(terms)
    for t in terms:
        if not need <= reachable_set(instance.graph, sol.arcs, t):
            return False
    return True


def validate_dsn(instance: DsnInstance, sol: EdgeSolution) -> bool:
    """True iff sol contains an s_i -> t_i path for every demand."""
    _check_host(instance.graph, sol)
    by_source: dict[int, set[int]] = {}
    for s, t in instance.demands:
        by_source.setdefault(s, set()).add(t)
    for s, targets in by_source.items():
        reach = reachable_set(instance.graph, sol.arcs, s)
        reach.add(s)
        if not targets <= reach:
            return False
    return True


def planarity_check(graph: WeightedDigraph) -> bool:
    """Planarity of the underlying simple undirected graph."""
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(tuple(e) for e in graph.undirected_simple_edges())
    ok, _ = nx.check_planarity(g, counterexample=False)
    return ok


def is_acyclic(graph: WeightedDigraph) -> bool:
    """True iff the digraph has no directed cycle (Kahn topological sort)."""
    indeg = [0] * graph.n
    for (t, h, _w) in graph.arcs:
        indeg[h] += 1
    queue = deque(v for v in range(graph.n) if indeg[v] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for a in graph.out_arcs(u):
            h = graph.head(a)
            indeg[h] -= 1
            if indeg[h] == 0:
                queue.append(h)
    return seen == graph.n


def strongly_connected_terminals(graph: WeightedDigraph, terminals: Sequence[int]) -> bool:
    """Feasibility test: are all terminals mutually reachable in the full graph?"""
    all_arcs = range(len(graph.arcs))
    need = set(terminals)
    for t in terminals:
        if not need <= reachable_set(graph, all_arcs, t):
            return False
    return True
