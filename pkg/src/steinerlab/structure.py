"""Structural analysis of minimal SCSS solutions.

A minimal solution decomposes into an in-arborescence and an out-arborescence
sharing a terminal root; branching points, terminals, and endpoints of shared
paths (components of the two arc sets' intersection) form a hitting set W of
size at most 9k whose removal leaves components of treewidth at most 2, each
meeting at most two essential paths which traverse their shared pieces in
opposite orders.  ``verify_structure`` checks all of that mechanically on a
given minimal solution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graph import (
    EdgeSolution,
    GraphError,
    ScssInstance,
    WeightedDigraph,
    reachable_set,
    validate_scss,
)
from .treewidth import treewidth_exact_edges, treewidth_upper_edges


class StructureError(ValueError):
    pass


def minimalize(instance: ScssInstance, sol: EdgeSolution) -> EdgeSolution:
    """Drop arcs (ascending id) while feasibility survives.

    One ascending pass reaches a fixpoint: feasibility is monotone, so an arc
    that could not be dropped against a superset cannot become droppable
    against a subset.
    """
    if not validate_scss(instance, sol):
        raise StructureError("input solution is infeasible")
    arcs = set(sol.arcs)
    for a in sorted(sol.arcs):
        arcs.discard(a)
        if not validate_scss(instance, EdgeSolution.of(instance.graph, arcs)):
            arcs.add(a)
    return EdgeSolution.of(instance.graph, arcs)


def solution_vertices(graph: WeightedDigraph, arcs: Iterable[int],
                      terminals: Iterable[int]) -> set[int]:
    vs = set(terminals)
    for a in arcs:
        t, h, _w = graph.arcs[a]
        vs.add(t)
        vs.add(h)
    return vs


@dataclass(frozen=True)
class ArborescencePair:
    """(A_in, A_out) arc sets rooted at a common terminal r.

    In A_out every non-root vertex has exactly one incoming arc (tree grows
    away from r); in A_in every non-root vertex has exactly one outgoing arc
    (towards r).  Leaves are terminals, and for a minimal solution M the
    union of the two arc sets is M.
    """

    root: int
    a_in: frozenset[int]
    a_out: frozenset[int]


def _spanning_out_tree(graph: WeightedDigraph, arcs: frozenset[int],
                       root: int, reverse: bool) -> dict[int, int]:
    """BFS tree as vertex -> incoming tree arc (orientation per ``reverse``)."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for a in sorted(arcs):
        t, h, _w = graph.arcs[a]
        if reverse:
            t, h = h, t
        adj.setdefault(t, []).append((h, a))
    parent: dict[int, int] = {}
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for (v, a) in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    parent[v] = a
                    nxt.append(v)
        frontier = nxt
    return parent


def _prune_tree(graph: WeightedDigraph, parent: dict[int, int], root: int,
                terminals: set[int], reverse: bool) -> frozenset[int]:
    """Iteratively drop non-terminal leaves of the BFS tree."""
    children: dict[int, int] = {}
    for v, a in parent.items():
        t, h, _w = graph.arcs[a]
        u = (h if reverse else t)
        children[u] = children.get(u, 0) + 1
    alive = dict(parent)
    leaves = [v for v in alive if children.get(v, 0) == 0 and v not in terminals]
    while leaves:
        v = leaves.pop()
        if v not in alive:
            continue
        a = alive.pop(v)
        t, h, _w = graph.arcs[a]
        u = (h if reverse else t)
        children[u] -= 1
        if children.get(u, 0) == 0 and u not in terminals and u != root:
            leaves.append(u)
    return frozenset(alive.values())


def decompose(M: EdgeSolution, instance: ScssInstance, r: int) -> ArborescencePair:
    """Split a minimal solution into pruned out-/in-arborescences at r.

    any valid pair of pruned arborescences has union M (the union is itself
    feasible and sits inside the minimal M), so the union check is a hard
    assertion rather than a search.
    """
    if r not in instance.terminals:
        raise StructureError("root must be a terminal")
    g = instance.graph
    terminals = set(instance.terminals)
    vs = solution_vertices(g, M.arcs, instance.terminals)
    parent_out = _spanning_out_tree(g, M.arcs, r, reverse=False)
    if not (terminals - {r}) <= set(parent_out):
        raise StructureError("root does not reach every terminal inside M")
    parent_in = _spanning_out_tree(g, M.arcs, r, reverse=True)
    if not (terminals - {r}) <= set(parent_in):
        raise StructureError("some terminal does not reach the root inside M")
    a_out = _prune_tree(g, parent_out, r, terminals, reverse=False)
    a_in = _prune_tree(g, parent_in, r, terminals, reverse=True)
    if a_out | a_in != M.arcs:
        raise StructureError(
            "arborescence union differs from M; input was not minimal")
    _check_arborescence(g, a_out, r, terminals, reverse=False)
    _check_arborescence(g, a_in, r, terminals, reverse=True)
    return ArborescencePair(root=r, a_in=a_in, a_out=a_out)


def _check_arborescence(graph, arcs, root, terminals, reverse) -> None:
    indeg: dict[int, int] = {}
    vs = {root}
    for a in arcs:
        t, h, _w = graph.arcs[a]
        if reverse:
            t, h = h, t
        vs.add(t)
        vs.add(h)
        indeg[h] = indeg.get(h, 0) + 1
    for v in vs:
        d = indeg.get(v, 0)
        if v == root:
            if d != 0:
                raise StructureError("root has a tree parent")
        elif d != 1:
            raise StructureError("non-root vertex without unique tree arc")
    outdeg: dict[int, int] = {}
    for a in arcs:
        t, h, _w = graph.arcs[a]
        if reverse:
            t, h = h, t
        outdeg[t] = outdeg.get(t, 0) + 1
    for v in vs:
        if outdeg.get(v, 0) == 0 and v not in terminals:
            raise StructureError("non-terminal leaf survived pruning")


@dataclass(frozen=True)
class EssentialPath:
    """Maximal arborescence path between terminals/branching points."""

    arcs: tuple[int, ...]
    endpoints: tuple[int, int]


def _arc_endpoints(graph, a, reverse):
    t, h, _w = graph.arcs[a]
    return (h, t) if reverse else (t, h)


def branching_points(graph: WeightedDigraph, arcs: frozenset[int],
                     reverse: bool) -> set[int]:
    """Out-degree >= 2 vertices of A_out (reverse=False) or in-degree >= 2
    of A_in (reverse=True); both are 'away from root' fan-outs."""
    deg: dict[int, int] = {}
    for a in arcs:
        u, _v = _arc_endpoints(graph, a, reverse)
        deg[u] = deg.get(u, 0) + 1
    return {v for v, d in deg.items() if d >= 2}


def essential_paths(graph: WeightedDigraph, arcs: frozenset[int],
                    terminals: Iterable[int], reverse: bool) -> list[EssentialPath]:
    """Decompose an arborescence into essential paths.

    ``reverse=False`` treats ``arcs`` as an out-arborescence (branching =
    out-degree >= 2); ``reverse=True`` as an in-arborescence (branching =
    in-degree >= 2).  The arc sets returned partition ``arcs``.
    """
    specials = set(terminals) | branching_points(graph, arcs, reverse)
    nxt: dict[int, list[int]] = {}
    indeg: dict[int, int] = {}
    vs = set()
    for a in sorted(arcs):
        u, v = _arc_endpoints(graph, a, reverse)
        nxt.setdefault(u, []).append(a)
        indeg[v] = indeg.get(v, 0) + 1
        vs.update((u, v))
    roots = [v for v in vs if indeg.get(v, 0) == 0]
    specials.update(roots)
    paths = []
    for start in sorted(specials & vs):
        for first in nxt.get(start, ()):
            chain = [first]
            _u, cur = _arc_endpoints(graph, first, reverse)
            while cur not in specials and nxt.get(cur):
                step = nxt[cur]
                assert len(step) == 1
                chain.append(step[0])
                _u, cur = _arc_endpoints(graph, step[0], reverse)
            if reverse:
                # A_in essential paths run along arc direction (towards r):
                # walking 'away from root' above traverses them backwards.
                chain.reverse()
                paths.append(EssentialPath(tuple(chain), (cur, start)))
            else:
                paths.append(EssentialPath(tuple(chain), (start, cur)))
    return paths


@dataclass(frozen=True)
class SharedPath:
    """A weakly connected component of E(A_in) & E(A_out) with its common
    vertices; always a directed path, possibly a single vertex."""

    vertices: tuple[int, ...]   # in path order
    arcs: tuple[int, ...]


def shared_paths(pair: ArborescencePair, graph: WeightedDigraph) -> list[SharedPath]:
    common_arcs = pair.a_in & pair.a_out
    vin = set()
    vout = set()
    for a in pair.a_in:
        t, h, _w = graph.arcs[a]
        vin.update((t, h))
    for a in pair.a_out:
        t, h, _w = graph.arcs[a]
        vout.update((t, h))
    common_vertices = vin & vout
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in common_vertices}
    for a in common_arcs:
        t, h, _w = graph.arcs[a]
        adj[t].append((h, a))
        adj[h].append((t, a))
    out: list[SharedPath] = []
    seen: set[int] = set()
    for v0 in sorted(common_vertices):
        if v0 in seen:
            continue
        comp = {v0}
        stack = [v0]
        while stack:
            u = stack.pop()
            for (w, _a) in adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comp_arcs = {a for u in comp for (_w, a) in adj[u]}
        out.append(_as_path(graph, comp, comp_arcs))
    return out


def _as_path(graph, vertices: set[int], arcs: set[int]) -> SharedPath:
    if len(arcs) != len(vertices) - 1:
        raise StructureError("intersection component is not a path (cycle)")
    indeg = {v: 0 for v in vertices}
    outdeg = {v: 0 for v in vertices}
    succ: dict[int, tuple[int, int]] = {}
    for a in arcs:
        t, h, _w = graph.arcs[a]
        outdeg[t] += 1
        indeg[h] += 1
        succ[t] = (h, a)
    if any(d > 1 for d in indeg.values()) or any(d > 1 for d in outdeg.values()):
        raise StructureError("intersection component is not a simple path")
    starts = [v for v in vertices if indeg[v] == 0]
    if len(starts) != 1:
        raise StructureError("intersection component is not a directed path")
    order = [starts[0]]
    arcseq = []
    while order[-1] in succ:
        h, a = succ[order[-1]]
        order.append(h)
        arcseq.append(a)
    if len(order) != len(vertices):
        raise StructureError("intersection component is not connected as a path")
    return SharedPath(tuple(order), tuple(arcseq))


@dataclass(frozen=True)
class WSet:
    """Hitting set of size <= 9k: terminals, branching points of either
    arborescence, and endpoints of shared paths that carry one of those."""

    vertices: frozenset[int]
    kinds: dict[int, frozenset[str]]


def build_w_set(M: EdgeSolution, pair: ArborescencePair,
                terminals: Iterable[int]) -> WSet:
    g = M.host
    terminals = set(terminals)
    kinds: dict[int, set[str]] = {}

    def tag(v: int, kind: str) -> None:
        kinds.setdefault(v, set()).add(kind)

    for t in terminals:
        tag(t, "terminal")
    for v in branching_points(g, pair.a_out, reverse=False):
        tag(v, "branching")
    for v in branching_points(g, pair.a_in, reverse=True):
        tag(v, "branching")
    special = set(kinds)
    for sp in shared_paths(pair, g):
        if special & set(sp.vertices):
            tag(sp.vertices[0], "shared-endpoint")
            tag(sp.vertices[-1], "shared-endpoint")
    w = WSet(frozenset(kinds), {v: frozenset(ks) for v, ks in kinds.items()})
    k = len(terminals)
    if len(w.vertices) > 9 * k:
        raise StructureError(f"|W| = {len(w.vertices)} exceeds 9k = {9 * k}")
    return w


@dataclass(frozen=True)
class WComponent:
    vertices: frozenset[int]
    arcs: frozenset[int]


def w_components(M: EdgeSolution, w: frozenset[int],
                 terminals: Iterable[int] = ()) -> list[WComponent]:
    """Connected components (underlying undirected) of V(M) - W."""
    g = M.host
    vs = solution_vertices(g, M.arcs, terminals) - w
    adj: dict[int, list[int]] = {v: [] for v in vs}
    for a in M.arcs:
        t, h, _w = g.arcs[a]
        if t in vs and h in vs:
            adj[t].append(h)
            adj[h].append(t)
    comps = []
    seen: set[int] = set()
    for v0 in sorted(vs):
        if v0 in seen:
            continue
        comp = {v0}
        stack = [v0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        comp_arcs = frozenset(a for a in M.arcs
                              if g.arcs[a][0] in comp and g.arcs[a][1] in comp)
        comps.append(WComponent(frozenset(comp), comp_arcs))
    return comps


def treewidth_le_2(vertices: Iterable[int],
                   edges: Iterable[frozenset[int]]) -> bool:
    """tw <= 2 recognizer: delete degree-<=1 vertices and smooth degree-2
    vertices (parallel edges merge) until nothing is left."""
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for e in edges:
        if len(e) != 2:
            continue  # self-loops never matter
        u, v = tuple(e)
        if u in adj and v in adj:
            adj[u].add(v)
            adj[v].add(u)
    queue = [v for v in adj if len(adj[v]) <= 2]
    while queue:
        v = queue.pop()
        if v not in adj:
            continue
        deg = len(adj[v])
        if deg > 2:
            continue
        if deg == 2:
            a, b = tuple(adj[v])
            adj[a].discard(v)
            adj[b].discard(v)
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
            del adj[v]
            for u in (a, b):
                if len(adj[u]) <= 2:
                    queue.append(u)
        else:
            for u in adj[v]:
                adj[u].discard(v)
                if len(adj[u]) <= 2:
                    queue.append(u)
            del adj[v]
    return not adj


def treewidth_le_2_graph(graph: WeightedDigraph) -> bool:
    return treewidth_le_2(range(graph.n), graph.undirected_simple_edges())


@dataclass
class StructureReport:
    k: int
    root: int
    w_size: int
    w_bound: int
    component_count: int
    components_tw_le_2: bool
    essential_paths_per_component_ok: bool
    shared_order_reversed_ok: bool
    solution_treewidth: Optional[int]
    treewidth_is_exact: bool
    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues


def _component_essential_paths(comp: WComponent, paths: list[EssentialPath]):
    hits = []
    for i, p in enumerate(paths):
        if set(p.arcs) & comp.arcs:
            hits.append(i)
    return hits


def _order_reversal_ok(graph, p: EssentialPath, q: EssentialPath) -> bool:
    """Components of E(P) & E(Q) must appear in opposite orders along P, Q."""
    pa, qa = set(p.arcs), set(q.arcs)
    common = pa & qa
    pv = _path_vertex_seq(graph, p.arcs)
    qv = _path_vertex_seq(graph, q.arcs)
    common_vertices = set(pv) & set(qv)
    if not common_vertices:
        return True
    # Group common vertices into weakly connected pieces of the common graph.
    adj: dict[int, set[int]] = {v: set() for v in common_vertices}
    for a in common:
        t, h, _w = graph.arcs[a]
        adj[t].add(h)
        adj[h].add(t)
    piece_of: dict[int, int] = {}
    npieces = 0
    for v0 in common_vertices:
        if v0 in piece_of:
            continue
        stack = [v0]
        piece_of[v0] = npieces
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in piece_of:
                    piece_of[v] = npieces
                    stack.append(v)
        npieces += 1
    if npieces < 2:
        return True
    p_order = _first_positions(pv, piece_of)
    q_order = _first_positions(qv, piece_of)
    return p_order == list(reversed(q_order))


def _path_vertex_seq(graph, arcseq: tuple[int, ...]) -> list[int]:
    if not arcseq:
        return []
    seq = [graph.arcs[arcseq[0]][0]]
    for a in arcseq:
        seq.append(graph.arcs[a][1])
    return seq


def _first_positions(vertex_seq, piece_of) -> list[int]:
    seen = []
    for v in vertex_seq:
        p = piece_of.get(v)
        if p is not None and (not seen or seen[-1] != p):
            if p in seen:
                raise StructureError("essential path revisits a shared piece")
            seen.append(p)
    return seen


def verify_structure(M: EdgeSolution, instance: ScssInstance,
                     r: int) -> StructureReport:
    """Run every structural claim against a minimal solution M."""
    issues: list[str] = []
    if not validate_scss(instance, M):
        raise StructureError("M is not a feasible solution")
    remin = minimalize(instance, M)
    if remin.arcs != M.arcs:
        issues.append("input solution is not minimal; downstream claims "
                      "would test the implementation, not the statement")
    pair = decompose(M, instance, r)
    try:
        shared = shared_paths(pair, instance.graph)
    except StructureError as e:
        issues.append(f"shared-path shape: {e}")
        shared = []
    w = build_w_set(M, pair, instance.terminals)
    comps = w_components(M, w.vertices, instance.terminals)
    tw_ok = True
    g = instance.graph
    for comp in comps:
        edges = {frozenset((g.arcs[a][0], g.arcs[a][1])) for a in comp.arcs
                 if g.arcs[a][0] != g.arcs[a][1]}
        if not treewidth_le_2(comp.vertices, edges):
            tw_ok = False
            issues.append(f"component {sorted(comp.vertices)} has treewidth > 2")
    in_paths = essential_paths(g, pair.a_in, instance.terminals, reverse=True)
    out_paths = essential_paths(g, pair.a_out, instance.terminals, reverse=False)
    per_comp_ok = True
    order_ok = True
    for comp in comps:
        hits_in = _component_essential_paths(comp, in_paths)
        hits_out = _component_essential_paths(comp, out_paths)
        if len(hits_in) > 1 or len(hits_out) > 1:
            per_comp_ok = False
            issues.append(
                f"component {sorted(comp.vertices)} meets {len(hits_in)} "
                f"A_in and {len(hits_out)} A_out essential paths")
            continue
        if hits_in and hits_out:
            if not _order_reversal_ok(g, in_paths[hits_in[0]],
                                      out_paths[hits_out[0]]):
                order_ok = False
                issues.append(
                    f"component {sorted(comp.vertices)}: shared pieces not "
                    "visited in opposite orders")
    vs = solution_vertices(g, M.arcs, instance.terminals)
    edges = {frozenset((g.arcs[a][0], g.arcs[a][1])) for a in M.arcs
             if g.arcs[a][0] != g.arcs[a][1]}
    if len(vs) <= 18:
        tw = treewidth_exact_edges(sorted(vs), edges).width
        exact = True
    else:
        tw, _td = treewidth_upper_edges(sorted(vs), edges)
        exact = False
    return StructureReport(
        k=instance.k, root=r, w_size=len(w.vertices), w_bound=9 * instance.k,
        component_count=len(comps), components_tw_le_2=tw_ok,
        essential_paths_per_component_ok=per_comp_ok,
        shared_order_reversed_ok=order_ok,
        solution_treewidth=tw, treewidth_is_exact=exact,
        issues=issues)
