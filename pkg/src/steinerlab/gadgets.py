"""Connector and main gadgets: builders, canonical solutions, checkers.

Both gadgets are weighted planar digraphs with distinguished boundary
vertices; an edge subset of bounded weight that keeps the gadget "connected"
in the defined sense is forced to *represent* one index (connector) or one
pair from the allowed set S (main gadget).  Builders can target a fresh
graph or write into a shared :class:`GraphBuilder` so that composed
instances keep gadget-local structure addressable.

Connector layout (n >= 1): grid rows R_0..R_{2n+3}, columns C_0..C_{4n};
interrow subdivision vertices w[i][j] for i in [n+1], j in [2n]; boundary
sources p_1..p_n, sinks q_1..q_n; internal terminals p (column-0side) and
q (column-4n side).  Base B = 18 n^2.

Main gadget layout: grid rows R_1..R_{n^2}, columns C_0..C_{2n+1}; boundary
lists L, R, T, B of size n plus primed relays l'_i, r'_i; shortcut split
vertices g[x][y], h[x][y] for each (x,y) in S.  Base B = 11 n^2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .graph import EdgeSolution, GraphBuilder, GraphError, WeightedDigraph, reachable_set


class GadgetError(ValueError):
    pass


def connector_target(n: int) -> int:
    """C*_n = 2B^5 + 4B^4 + (2n+1)B^3 + (n+1)B^2 + (4n-2)B + (n+1)^2."""
    b = 18 * n * n
    return (2 * b**5 + 4 * b**4 + (2 * n + 1) * b**3
            + (n + 1) * b**2 + (4 * n - 2) * b + (n + 1) ** 2)


def main_target(n: int) -> int:
    """M*_n = 4B^4 + B^3 + B^2 n^2 + B(6n-4) + 2(n^2-1)."""
    b = 11 * n * n
    return 4 * b**4 + b**3 + b**2 * n * n + b * (6 * n - 4) + 2 * (n * n - 1)


@dataclass
class ConnectorGadget:
    n: int
    base: int
    target_weight: int
    tag: str
    p: int
    q: int
    sources: tuple[int, ...]          # p_1..p_n (index 0 holds p_1)
    sinks: tuple[int, ...]            # q_1..q_n
    grid: dict[tuple[int, int], int]  # (row, col) -> vertex id
    w: dict[tuple[int, int], int]     # interrow split vertices
    source_arc: dict[int, int]        # i -> arc id of (p_i, ...)
    sink_arc: dict[int, int]
    shortcut_e: dict[int, int]
    shortcut_f: dict[int, int]
    arc_by_ends: dict[tuple[int, int], int]
    arcs: frozenset[int]
    families: dict[str, tuple[int, ...]]
    graph: Optional[WeightedDigraph] = None

    def vertex_ids(self) -> set[int]:
        ids = {self.p, self.q, *self.sources, *self.sinks}
        ids.update(self.grid.values())
        ids.update(self.w.values())
        return ids


def build_connector(n: int, builder: Optional[GraphBuilder] = None,
                    source_glue: Optional[Sequence[int]] = None,
                    sink_glue: Optional[Sequence[int]] = None,
                    tag: str = "CG") -> ConnectorGadget:
    """Construct CG_n, optionally reusing existing vertices for P / Q.

    ``source_glue``/``sink_glue`` are length-n vertex lists of a shared
    builder; when given, the gadget's source/sink-distinguished vertices are
    identified with them instead of creating fresh ones.
    """
    if n < 1:
        raise GadgetError("connector needs n >= 1")
    standalone = builder is None
    bld = GraphBuilder() if standalone else builder
    b = 18 * n * n
    half = b * b // 2
    assert 2 * half == b * b

    p = bld.add_vertex(f"{tag}:p")
    q = bld.add_vertex(f"{tag}:q")
    if source_glue is None:
        sources = tuple(bld.add_vertex(f"{tag}:p_{i}") for i in range(1, n + 1))
    else:
        if len(source_glue) != n:
            raise GadgetError("source_glue must list n vertices")
        sources = tuple(source_glue)
    if sink_glue is None:
        sinks = tuple(bld.add_vertex(f"{tag}:q_{i}") for i in range(1, n + 1))
    else:
        if len(sink_glue) != n:
            raise GadgetError("sink_glue must list n vertices")
        sinks = tuple(sink_glue)

    grid = {(i, j): bld.add_vertex(f"{tag}:v_{i}^{j}")
            for i in range(2 * n + 4) for j in range(4 * n + 1)}
    w = {(i, j): bld.add_vertex(f"{tag}:w_{i}^{j}")
         for i in range(1, n + 2) for j in range(1, 2 * n + 1)}

    fam: dict[str, list[int]] = {name: [] for name in (
        "source", "sink", "terminal", "up", "down", "left", "right",
        "interrow", "shortcut")}
    arc_by_ends: dict[tuple[int, int], int] = {}

    def arc(u: int, v: int, weight: int, family: str) -> int:
        a = bld.add_arc(u, v, weight)
        fam[family].append(a)
        arc_by_ends[(u, v)] = a
        return a

    source_arc = {i: arc(sources[i - 1], grid[(0, 2 * i - 1)],
                         b**5 + (n - i + 1), "source")
                  for i in range(1, n + 1)}
    sink_arc = {i: arc(grid[(2 * n + 3, 2 * n + 2 * i - 1)], sinks[i - 1],
                       b**5 + i, "sink")
                for i in range(1, n + 1)}
    for ell in range(1, n + 1):
        arc(p, grid[(2 * ell + 1, 0)], b**4, "terminal")
        arc(grid[(2 * ell, 0)], p, b**4, "terminal")
        arc(q, grid[(2 * ell + 1, 4 * n)], b**4, "terminal")
        arc(grid[(2 * ell, 4 * n)], q, b**4, "terminal")
    for i in range(n + 2):
        for j in range(2 * n + 1):
            arc(grid[(2 * i + 1, 2 * j)], grid[(2 * i, 2 * j)], b**3, "up")
        for j in range(1, 2 * n + 1):
            arc(grid[(2 * i, 2 * j - 1)], grid[(2 * i + 1, 2 * j - 1)], 0, "down")
            arc(grid[(2 * i, 2 * j)], grid[(2 * i, 2 * j - 1)], 0, "left")
            arc(grid[(2 * i + 1, 2 * j - 1)], grid[(2 * i + 1, 2 * j - 2)], 0, "left")
            arc(grid[(2 * i, 2 * j - 2)], grid[(2 * i, 2 * j - 1)], b, "right")
            arc(grid[(2 * i + 1, 2 * j - 1)], grid[(2 * i + 1, 2 * j)], b, "right")
    for i in range(1, n + 2):
        for j in range(1, 2 * n + 1):
            arc(grid[(2 * i - 1, 2 * j - 1)], w[(i, j)], half, "interrow")
            arc(w[(i, j)], grid[(2 * i, 2 * j - 1)], half, "interrow")
    shortcut_e = {}
    shortcut_f = {}
    for i in range(1, n + 1):
        shortcut_e[i] = arc(grid[(2 * n - 2 * i + 2, 2 * i - 2)],
                            w[(n - i + 1, i)], n * i, "shortcut")
        shortcut_f[i] = arc(w[(n - i + 2, n + i)],
                            grid[(2 * n - 2 * i + 3, 2 * n + 2 * i)],
                            n * (n - i + 1), "shortcut")

    gadget = ConnectorGadget(
        n=n, base=b, target_weight=connector_target(n), tag=tag,
        p=p, q=q, sources=sources, sinks=sinks, grid=grid, w=w,
        source_arc=source_arc, sink_arc=sink_arc,
        shortcut_e=shortcut_e, shortcut_f=shortcut_f,
        arc_by_ends=arc_by_ends,
        arcs=frozenset(a for lst in fam.values() for a in lst),
        families={k: tuple(v) for k, v in fam.items()},
    )
    if standalone:
        gadget.graph = bld.freeze()
    return gadget


def connector_canonical(gadget: ConnectorGadget, i: int) -> EdgeSolution:
    """The explicit edge set E_i: weight C*_n, connected, represents i."""
    n = gadget.n
    if not (1 <= i <= n):
        raise GadgetError(f"index {i} out of range [1, {n}]")
    if gadget.graph is None:
        raise GadgetError("gadget not attached to a frozen graph")
    g, grid, w = gadget.graph, gadget.grid, gadget.w
    by = gadget.arc_by_ends
    rows = (2 * n - 2 * i + 2, 2 * n - 2 * i + 3)
    arcs: set[int] = {gadget.source_arc[i], gadget.sink_arc[i]}
    arcs.add(by[(gadget.p, grid[(rows[1], 0)])])
    arcs.add(by[(grid[(rows[0], 0)], gadget.p)])
    arcs.add(by[(gadget.q, grid[(rows[1], 4 * n)])])
    arcs.add(by[(grid[(rows[0], 4 * n)], gadget.q)])
    # Full left/right sets on the two rows, ups and downs between them.
    for j in range(1, 2 * n + 1):
        arcs.add(by[(grid[(rows[0], 2 * j)], grid[(rows[0], 2 * j - 1)])])
        arcs.add(by[(grid[(rows[0], 2 * j - 2)], grid[(rows[0], 2 * j - 1)])])
        arcs.add(by[(grid[(rows[1], 2 * j - 1)], grid[(rows[1], 2 * j - 2)])])
        arcs.add(by[(grid[(rows[1], 2 * j - 1)], grid[(rows[1], 2 * j)])])
        arcs.add(by[(grid[(rows[0], 2 * j - 1)], grid[(rows[1], 2 * j - 1)])])
    for j in range(2 * n + 1):
        arcs.add(by[(grid[(rows[1], 2 * j)], grid[(rows[0], 2 * j)])])
    # Downward path P1 in column 2i-1 from row 0 to row 2n-2i+3.
    col = 2 * i - 1
    for r in range(0, n - i + 2):
        arcs.add(by[(grid[(2 * r, col)], grid[(2 * r + 1, col)])])
    for r in range(1, n - i + 2):
        arcs.add(by[(grid[(2 * r - 1, col)], w[(r, i)])])
        arcs.add(by[(w[(r, i)], grid[(2 * r, col)])])
    # Downward path P2 in column 2n+2i-1 from row 2n-2i+2 to row 2n+3.
    col2 = 2 * n + 2 * i - 1
    for r in range(n - i + 1, n + 2):
        arcs.add(by[(grid[(2 * r, col2)], grid[(2 * r + 1, col2)])])
    for r in range(n - i + 2, n + 2):
        arcs.add(by[(grid[(2 * r - 1, col2)], w[(r, n + i)])])
        arcs.add(by[(w[(r, n + i)], grid[(2 * r, col2)])])
    arcs.add(gadget.shortcut_e[i])
    arcs.add(gadget.shortcut_f[i])
    # Two inrow rights are traded for the shortcut detours.
    arcs.discard(by[(grid[(rows[0], 2 * i - 2)], grid[(rows[0], 2 * i - 1)])])
    arcs.discard(by[(grid[(rows[1], 2 * n + 2 * i - 1)], grid[(rows[1], 2 * n + 2 * i)])])
    return EdgeSolution.of(g, arcs)


def _own_arcs(gadget, edge_set: Iterable[int]) -> frozenset[int]:
    arcs = frozenset(edge_set)
    foreign = arcs - gadget.arcs
    if foreign:
        raise GadgetError(f"{len(foreign)} edges do not belong to gadget {gadget.tag}")
    return arcs


def _reaches(graph: WeightedDigraph, arcs: frozenset[int],
             sources: Iterable[int], targets: Iterable[int]) -> bool:
    targets = set(targets)
    for s in set(sources):
        reach = reachable_set(graph, arcs, s)
        if reach & targets:
            return True
    return False


def connector_connectedness(gadget: ConnectorGadget, edge_set: Iterable[int]) -> bool:
    """Four conditions: P reaches p, P reaches q, p reaches Q, q reaches Q."""
    arcs = _own_arcs(gadget, edge_set)
    g = gadget.graph
    return (_reaches(g, arcs, gadget.sources, [gadget.p])
            and _reaches(g, arcs, gadget.sources, [gadget.q])
            and _reaches(g, arcs, [gadget.p], gadget.sinks)
            and _reaches(g, arcs, [gadget.q], gadget.sinks))


def connector_represents(gadget: ConnectorGadget, edge_set: Iterable[int]) -> Optional[int]:
    """The represented index, or None.

    Requires the connectedness property (raises otherwise).  Represents i
    iff the unique edge leaving P is at p_i and the unique edge entering Q
    is at q_i.
    """
    arcs = _own_arcs(gadget, edge_set)
    if not connector_connectedness(gadget, arcs):
        raise GadgetError("edge set violates the connectedness property")
    out_p = [i for i, a in gadget.source_arc.items() if a in arcs]
    in_q = [i for i, a in gadget.sink_arc.items() if a in arcs]
    if len(out_p) == 1 and len(in_q) == 1 and out_p[0] == in_q[0]:
        return out_p[0]
    return None


@dataclass
class MainGadget:
    n: int
    S: frozenset[tuple[int, int]]
    base: int
    target_weight: int
    tag: str
    left: tuple[int, ...]
    right: tuple[int, ...]
    top: tuple[int, ...]
    bottom: tuple[int, ...]
    left_primed: tuple[int, ...]
    right_primed: tuple[int, ...]
    grid: dict[tuple[int, int], int]
    gsplit: dict[tuple[int, int], int]
    hsplit: dict[tuple[int, int], int]
    left_source_arc: dict[int, int]
    right_sink_arc: dict[int, int]
    top_source_arc: dict[int, int]
    bottom_sink_arc: dict[int, int]
    source_internal_arc: dict[int, int]   # j -> arc
    sink_internal_arc: dict[int, int]
    bridge_arc: dict[int, int]
    down_arcs: dict[tuple[int, int], tuple[int, ...]]  # (row i, col j) -> arcs v_i^j ~> v_{i+1}^j
    shortcut_e: dict[tuple[int, int], int]
    shortcut_f: dict[tuple[int, int], int]
    arc_by_ends: dict[tuple[int, int], int]
    arcs: frozenset[int]
    families: dict[str, tuple[int, ...]]
    graph: Optional[WeightedDigraph] = None

    def vertex_ids(self) -> set[int]:
        ids = set(self.left) | set(self.right) | set(self.top) | set(self.bottom)
        ids.update(self.left_primed)
        ids.update(self.right_primed)
        ids.update(self.grid.values())
        ids.update(self.gsplit.values())
        ids.update(self.hsplit.values())
        return ids


def build_main(n: int, S: Iterable[tuple[int, int]],
               builder: Optional[GraphBuilder] = None,
               tag: str = "MG", allow_border: bool = False) -> MainGadget:
    """Construct MG_S with shortcut pairs exactly for the entries of S.

    Entries must satisfy 1 < x,y < n (use normalize_gridtiling to arrange
    this).  ``allow_border`` relaxes that to the structural requirement
    2 <= n(x-1)+y <= n^2 - 1, for desk-scale oracle experiments only.
    """
    if n < 1:
        raise GadgetError("main gadget needs n >= 1")
    S = frozenset(S)
    for (x, y) in S:
        if not (1 <= x <= n and 1 <= y <= n):
            raise GadgetError(f"S entry {(x, y)} outside [n]x[n]")
        if not allow_border and not (1 < x < n and 1 < y < n):
            raise GadgetError(f"S entry {(x, y)} on the border (needs 1<x,y<n)")
        z = n * (x - 1) + y
        if not (2 <= z <= n * n - 1):
            raise GadgetError(f"S entry {(x, y)} has no room for shortcut splits")
    standalone = builder is None
    bld = GraphBuilder() if standalone else builder
    b = 11 * n * n

    left = tuple(bld.add_vertex(f"{tag}:l_{i}") for i in range(1, n + 1))
    left_primed = tuple(bld.add_vertex(f"{tag}:l'_{i}") for i in range(1, n + 1))
    right = tuple(bld.add_vertex(f"{tag}:r_{i}") for i in range(1, n + 1))
    right_primed = tuple(bld.add_vertex(f"{tag}:r'_{i}") for i in range(1, n + 1))
    top = tuple(bld.add_vertex(f"{tag}:t_{i}") for i in range(1, n + 1))
    bottom = tuple(bld.add_vertex(f"{tag}:b_{i}") for i in range(1, n + 1))
    grid = {(i, j): bld.add_vertex(f"{tag}:v_{i}^{j}")
            for i in range(1, n * n + 1) for j in range(2 * n + 2)}
    gsplit = {(x, y): bld.add_vertex(f"{tag}:g_{x}^{y}") for (x, y) in sorted(S)}
    hsplit = {(x, y): bld.add_vertex(f"{tag}:h_{x}^{y}") for (x, y) in sorted(S)}

    fam: dict[str, list[int]] = {name: [] for name in (
        "left_source", "right_sink", "top_source", "bottom_sink",
        "source_internal", "sink_internal", "bridge", "right", "down",
        "shortcut")}
    arc_by_ends: dict[tuple[int, int], int] = {}

    def arc(u: int, v: int, weight: int, family: str) -> int:
        a = bld.add_arc(u, v, weight)
        fam[family].append(a)
        arc_by_ends[(u, v)] = a
        return a

    left_source_arc = {i: arc(left[i - 1], left_primed[i - 1], b**4, "left_source")
                       for i in range(1, n + 1)}
    right_sink_arc = {i: arc(right_primed[i - 1], right[i - 1], b**4, "right_sink")
                      for i in range(1, n + 1)}
    top_source_arc = {i: arc(top[i - 1], grid[(1, i)], b**4, "top_source")
                      for i in range(1, n + 1)}
    bottom_sink_arc = {i: arc(grid[(n * n, n + i)], bottom[i - 1], b**4, "bottom_sink")
                       for i in range(1, n + 1)}
    source_internal_arc = {}
    sink_internal_arc = {}
    for i in range(1, n + 1):
        for j in range(n * (i - 1) + 1, n * i + 1):
            source_internal_arc[j] = arc(left_primed[i - 1], grid[(j, 0)],
                                         b**2 * (n * n - j), "source_internal")
            sink_internal_arc[j] = arc(grid[(j, 2 * n + 1)], right_primed[i - 1],
                                       b**2 * j, "sink_internal")
    bridge_arc = {i: arc(grid[(i, n)], grid[(i, n + 1)], b**3, "bridge")
                  for i in range(1, n * n + 1)}
    for i in range(1, n * n + 1):
        for j in list(range(0, n)) + list(range(n + 1, 2 * n + 1)):
            arc(grid[(i, j)], grid[(i, j + 1)], 3 * b, "right")

    # Interrow down edges; the two split locations per S entry get a
    # midpoint vertex and two weight-1 halves.
    g_split_edges = {(n * (x - 1) + y - 1, y): (x, y) for (x, y) in S}
    h_split_edges = {(n * (x - 1) + y, n + y): (x, y) for (x, y) in S}
    down_arcs: dict[tuple[int, int], tuple[int, ...]] = {}
    for i in range(1, n * n):
        for j in range(1, 2 * n + 1):
            if (i, j) in g_split_edges:
                x, y = g_split_edges[(i, j)]
                mid = gsplit[(x, y)]
            elif (i, j) in h_split_edges:
                x, y = h_split_edges[(i, j)]
                mid = hsplit[(x, y)]
            else:
                down_arcs[(i, j)] = (arc(grid[(i, j)], grid[(i + 1, j)], 2, "down"),)
                continue
            a1 = arc(grid[(i, j)], mid, 1, "down")
            a2 = arc(mid, grid[(i + 1, j)], 1, "down")
            down_arcs[(i, j)] = (a1, a2)
    shortcut_e = {}
    shortcut_f = {}
    for (x, y) in sorted(S):
        z = n * (x - 1) + y
        shortcut_e[(x, y)] = arc(grid[(z, y - 1)], gsplit[(x, y)], b, "shortcut")
        shortcut_f[(x, y)] = arc(hsplit[(x, y)], grid[(z, n + y + 1)], b, "shortcut")

    gadget = MainGadget(
        n=n, S=S, base=b, target_weight=main_target(n), tag=tag,
        left=left, right=right, top=top, bottom=bottom,
        left_primed=left_primed, right_primed=right_primed,
        grid=grid, gsplit=gsplit, hsplit=hsplit,
        left_source_arc=left_source_arc, right_sink_arc=right_sink_arc,
        top_source_arc=top_source_arc, bottom_sink_arc=bottom_sink_arc,
        source_internal_arc=source_internal_arc,
        sink_internal_arc=sink_internal_arc,
        bridge_arc=bridge_arc, down_arcs=down_arcs,
        shortcut_e=shortcut_e, shortcut_f=shortcut_f,
        arc_by_ends=arc_by_ends,
        arcs=frozenset(a for lst in fam.values() for a in lst),
        families={k: tuple(v) for k, v in fam.items()},
    )
    if standalone:
        gadget.graph = bld.freeze()
    return gadget


def main_canonical(gadget: MainGadget, xy: tuple[int, int]) -> EdgeSolution:
    """The explicit edge set E_{x,y}: weight M*_n, represents (x, y)."""
    x, y = xy
    if (x, y) not in gadget.S:
        raise GadgetError(f"{(x, y)} not in S")
    if gadget.graph is None:
        raise GadgetError("gadget not attached to a frozen graph")
    n = gadget.n
    z = n * (x - 1) + y
    by = gadget.arc_by_ends
    grid = gadget.grid
    arcs: set[int] = {
        gadget.left_source_arc[x], gadget.right_sink_arc[x],
        gadget.top_source_arc[y], gadget.bottom_sink_arc[y],
        gadget.bridge_arc[z],
        gadget.source_internal_arc[z], gadget.sink_internal_arc[z],
        gadget.shortcut_e[(x, y)], gadget.shortcut_f[(x, y)],
    }
    for j in list(range(0, n)) + list(range(n + 1, 2 * n + 1)):
        if j == y - 1 or j == n + y:
            continue  # traded for the shortcut detours
        arcs.add(by[(grid[(z, j)], grid[(z, j + 1)])])
    for i in range(1, z):
        arcs.update(gadget.down_arcs[(i, y)])
    for i in range(z, n * n):
        arcs.update(gadget.down_arcs[(i, n + y)])
    return EdgeSolution.of(gadget.graph, arcs)


def main_connectedness(gadget: MainGadget, edge_set: Iterable[int]) -> bool:
    """Conditions: L -> R u B, T -> R u B, L u T -> R, L u T -> B."""
    arcs = _own_arcs(gadget, edge_set)
    g = gadget.graph
    rb = list(gadget.right) + list(gadget.bottom)
    lt = list(gadget.left) + list(gadget.top)
    return (_reaches(g, arcs, gadget.left, rb)
            and _reaches(g, arcs, gadget.top, rb)
            and _reaches(g, arcs, lt, gadget.right)
            and _reaches(g, arcs, lt, gadget.bottom))


def main_represents(gadget: MainGadget, edge_set: Iterable[int]) -> Optional[tuple[int, int]]:
    """The represented pair, or None; raises if connectedness fails."""
    arcs = _own_arcs(gadget, edge_set)
    if not main_connectedness(gadget, arcs):
        raise GadgetError("edge set violates the connectedness property")
    lout = [i for i, a in gadget.left_source_arc.items() if a in arcs]
    rin = [i for i, a in gadget.right_sink_arc.items() if a in arcs]
    tout = [j for j, a in gadget.top_source_arc.items() if a in arcs]
    bin_ = [j for j, a in gadget.bottom_sink_arc.items() if a in arcs]
    if not (len(lout) == len(rin) == len(tout) == len(bin_) == 1):
        return None
    i, j = lout[0], tout[0]
    if rin[0] != i or bin_[0] != j:
        return None
    g = gadget.graph
    if not reachable_set(g, arcs, gadget.left[i - 1]) >= {gadget.right[i - 1]}:
        return None
    if not reachable_set(g, arcs, gadget.top[j - 1]) >= {gadget.bottom[j - 1]}:
        return None
    return (i, j)
