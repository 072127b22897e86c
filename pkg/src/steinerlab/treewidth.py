"""Tree decompositions: exact small-graph treewidth and heuristic bounds.

Exact treewidth uses the classic subset DP over elimination prefixes
(f(S) = min over v in S of max(f(S-v), q(S-v, v)) where q counts the
neighbours of v's component in G[S u {v}] outside S).  A witness
decomposition is rebuilt from the recovered elimination order by the
fill-in construction.  The heuristic bound eliminates by min-fill.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .graph import WeightedDigraph

EXACT_VERTEX_LIMIT = 22


class TreewidthError(ValueError):
    pass


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed 0..len-1 with undirected tree edges between bag indices."""

    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def validate(self, vertices: Iterable[int],
                 edges: Iterable[frozenset[int]]) -> None:
        """Check properties (P1) coverage, (P2) edges, (P3) connectivity."""
        vertices = set(vertices)
        nb = len(self.bags)
        if nb == 0:
            if vertices:
                raise TreewidthError("empty decomposition for nonempty graph")
            return
        if len(self.tree_edges) != nb - 1:
            raise TreewidthError("decomposition tree is not a tree (edge count)")
        adj: dict[int, set[int]] = {i: set() for i in range(nb)}
        for (a, b) in self.tree_edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != nb:
            raise TreewidthError("decomposition tree is not connected")
        covered = set().union(*self.bags) if self.bags else set()
        if not vertices <= covered:
            raise TreewidthError("(P1) violated: vertex missing from all bags")
        for e in edges:
            if len(e) == 1:
                continue
            if not any(e <= bag for bag in self.bags):
                raise TreewidthError(f"(P2) violated for edge {set(e)}")
        for v in vertices:
            holding = [i for i, bag in enumerate(self.bags) if v in bag]
            hold = set(holding)
            comp = {holding[0]}
            stack = [holding[0]]
            while stack:
                u = stack.pop()
                for x in adj[u]:
                    if x in hold and x not in comp:
                        comp.add(x)
                        stack.append(x)
            if comp != hold:
                raise TreewidthError(f"(P3) violated for vertex {v}")


def _simple_adjacency(vertices: Sequence[int],
                      edges: Iterable[frozenset[int]]) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for e in edges:
        if len(e) != 2:
            continue
        u, v = tuple(e)
        if u in adj and v in adj:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def _decomposition_from_order(order: Sequence[int],
                              adj: dict[int, set[int]]) -> TreeDecomposition:
    """Fill-in construction: bag(v) = {v} + current neighbourhood of v."""
    work = {v: set(ns) for v, ns in adj.items()}
    position = {v: i for i, v in enumerate(order)}
    bags: list[frozenset[int]] = []
    edges: list[tuple[int, int]] = []
    bag_index: dict[int, int] = {}
    for v in order:
        nbrs = work[v]
        bags.append(frozenset({v} | nbrs))
        bag_index[v] = len(bags) - 1
        for a in nbrs:
            for b in nbrs:
                if a != b:
                    work[a].add(b)
        for a in nbrs:
            work[a].discard(v)
        del work[v]
        if nbrs:
            nxt = min(nbrs, key=lambda u: position[u])
            # bag(v) links to bag(nxt) once nxt is eliminated; remember via
            # a placeholder resolved after all bags exist.
            edges.append((bag_index[v], -position[nxt]))
    resolved = []
    for (a, marker) in edges:
        nxt_vertex = order[-marker]
        resolved.append((a, bag_index[nxt_vertex]))
    # Link any unconnected roots in a chain so the result is one tree.
    nb = len(bags)
    parent = list(range(nb))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (a, b) in resolved:
        parent[find(a)] = find(b)
    roots = sorted({find(i) for i in range(nb)})
    for a, b in zip(roots, roots[1:]):
        resolved.append((a, b))
        parent[find(a)] = find(b)
    return TreeDecomposition(tuple(bags), tuple(resolved))


def treewidth_exact_edges(vertices: Sequence[int],
                          edges: Iterable[frozenset[int]]) -> TreeDecomposition:
    """Minimum-width decomposition by subset DP; ~22 vertex ceiling."""
    vertices = list(dict.fromkeys(vertices))
    n = len(vertices)
    if n > EXACT_VERTEX_LIMIT:
        raise TreewidthError(
            f"exact treewidth limited to {EXACT_VERTEX_LIMIT} vertices; "
            "use treewidth_upper")
    if n == 0:
        return TreeDecomposition((), ())
    index = {v: i for i, v in enumerate(vertices)}
    adjmask = [0] * n
    adj = _simple_adjacency(vertices, edges)
    for v, ns in adj.items():
        for u in ns:
            adjmask[index[v]] |= 1 << index[u]

    full = (1 << n) - 1
    INF = n + 1
    f = [INF] * (full + 1)
    pick = [0] * (full + 1)
    f[0] = -1

    def q(S: int, v: int) -> int:
        # Component of v in G[S + v], then its outside neighbourhood.
        comp = 1 << v
        stack = [v]
        nbrs = 0
        while stack:
            u = stack.pop()
            m = adjmask[u]
            nbrs |= m
            new = m & S & ~comp
            comp |= new
            while new:
                low = new & -new
                stack.append(low.bit_length() - 1)
                new ^= low
        return (nbrs & ~S & ~(1 << v)).bit_count()

    for S in range(1, full + 1):
        best = INF
        bestv = -1
        T = S
        while T:
            low = T & -T
            v = low.bit_length() - 1
            T ^= low
            rest = S ^ low
            val = f[rest]
            qv = q(rest, v)
            if qv > val:
                val = qv
            if val < best:
                best = val
                bestv = v
        f[S] = best
        pick[S] = bestv

    order_idx = []
    S = full
    while S:
        v = pick[S]
        order_idx.append(v)
        S ^= 1 << v
    order_idx.reverse()
    order = [vertices[i] for i in order_idx]
    td = _decomposition_from_order(order, adj)
    assert td.width == f[full], (td.width, f[full])
    td.validate(vertices, [frozenset((u, v)) for v, ns in adj.items()
                           for u in ns if u < v])
    return td


def treewidth_exact_small(graph: WeightedDigraph) -> TreeDecomposition:
    """Exact treewidth of the underlying simple undirected graph."""
    return treewidth_exact_edges(list(range(graph.n)),
                                 graph.undirected_simple_edges())


def treewidth_upper_edges(vertices: Sequence[int],
                          edges: Iterable[frozenset[int]]) -> tuple[int, TreeDecomposition]:
    """Min-fill greedy elimination; width >= true treewidth."""
    vertices = list(dict.fromkeys(vertices))
    adj = _simple_adjacency(vertices, edges)
    work = {v: set(ns) for v, ns in adj.items()}
    order = []
    while work:
        best_v, best_key = None, None
        for v, ns in work.items():
            fill = 0
            nl = list(ns)
            for i in range(len(nl)):
                for j in range(i + 1, len(nl)):
                    if nl[j] not in work[nl[i]]:
                        fill += 1
            key = (fill, len(ns), v)
            if best_key is None or key < best_key:
                best_key, best_v = key, v
        order.append(best_v)
        ns = work[best_v]
        for a in ns:
            for b in ns:
                if a != b:
                    work[a].add(b)
        for a in ns:
            work[a].discard(best_v)
        del work[best_v]
    td = _decomposition_from_order(order, adj)
    td.validate(vertices, [frozenset((u, v)) for v, ns in adj.items()
                           for u in ns if u < v])
    return td.width, td


def treewidth_upper(graph: WeightedDigraph) -> tuple[int, TreeDecomposition]:
    return treewidth_upper_edges(list(range(graph.n)),
                                 graph.undirected_simple_edges())
