"""The three hardness reductions, their witness builders, and gadget-level
interface checks.

* Grid Tiling -> planar SCSS: k^2 main gadgets in a grid, a connector gadget
  between every horizontally or vertically adjacent pair (and on the outer
  boundary), glued by identifying boundary vertices of equal index, plus hub
  vertices x*, y* wired with zero-weight edges.  Budget
  W*_n = k^2 M*_n + 2k(k+1) C*_n.
* PSI -> SCSS on general graphs: unit-weight selection structure with
  terminal sets B (pattern vertices) and F (ordered pattern edges); budget
  3*ell + 10*|E_G| edges.
* Grid Tiling -> DSN on planar DAGs: k^2 grid gadgets threaded by kn
  horizontal and kn vertical canonical paths; green shortcuts save one unit
  per gadget exactly when both crossing paths pick an allowed pair.  Budget
  context B* = 2k(Delta(n+1) + 2(k+1) + 2k(n-1)) with Delta = 5n^2, decision
  threshold B* - k^2.

Provenance maps every produced vertex and arc back to its owning gadget and
paper-style coordinate so gadget-local checks stay expressible after
composition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .gadgets import (
    ConnectorGadget,
    MainGadget,
    build_connector,
    build_main,
    connector_canonical,
    connector_connectedness,
    connector_target,
    main_canonical,
    main_connectedness,
    main_target,
)
from .graph import (
    DsnInstance,
    EdgeSolution,
    GraphBuilder,
    GraphError,
    ScssInstance,
    WeightedDigraph,
)
from .problems import (
    GridTilingAssignment,
    GridTilingInstance,
    ProblemError,
    PsiAssignment,
    PsiInstance,
    check_gridtiling,
    check_psi,
)


class ReductionError(ValueError):
    pass


@dataclass
class ReductionArtifact:
    """Produced instance, its budget constant, and provenance back to the
    source problem's coordinates."""

    instance: Union[ScssInstance, DsnInstance]
    budget: int
    vertex_provenance: dict[int, tuple[tuple[str, str], ...]]
    arc_provenance: dict[int, tuple[str, str]]
    gadgets: dict[str, object] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)


def _gadget_provenance(artifact: ReductionArtifact, gadget, graph: WeightedDigraph):
    for v in gadget.vertex_ids():
        coord = graph.label(v) or str(v)
        entry = (gadget.tag, coord)
        prev = artifact.vertex_provenance.get(v, ())
        if entry not in prev:
            artifact.vertex_provenance[v] = prev + (entry,)
    for a in gadget.arcs:
        artifact.arc_provenance[a] = (gadget.tag, f"arc{a}")


def _require_scss_normalized(gt: GridTilingInstance) -> None:
    for i in range(1, gt.k + 1):
        for j in range(1, gt.k + 1):
            for (x, y) in gt.cell(i, j):
                if not (1 < x < gt.n and 1 < y < gt.n):
                    raise ReductionError(
                        f"cell ({i},{j}) entry {(x, y)} not strictly interior; "
                        "apply normalize_gridtiling(shift=2) first")


def compose_scss(gt: GridTilingInstance,
                 allow_border: bool = False) -> ReductionArtifact:
    """Grid Tiling -> planar SCSS instance (G*, T*) with budget W*_n.

    Expects a shift-2 normalized instance (all coordinates strictly
    interior).  ``allow_border`` relaxes that to the structural minimum so
    desk-scale n=2 experiments can exist at all; the interior of [2] is
    empty, so no strictly normalized n=2 instance does.
    """
    if not allow_border:
        _require_scss_normalized(gt)
    k, n = gt.k, gt.n
    bld = GraphBuilder()

    mains: dict[tuple[int, int], MainGadget] = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            mains[(i, j)] = build_main(n, gt.cell(i, j), builder=bld,
                                       tag=f"MG[{i},{j}]",
                                       allow_border=allow_border)
    hcg: dict[tuple[int, int], ConnectorGadget] = {}
    for i in range(1, k + 1):
        for j in range(1, k + 2):
            src = list(mains[(i, j - 1)].right) if j >= 2 else None
            snk = list(mains[(i, j)].left) if j <= k else None
            hcg[(i, j)] = build_connector(n, builder=bld, source_glue=src,
                                          sink_glue=snk, tag=f"HCG[{i},{j}]")
    vcg: dict[tuple[int, int], ConnectorGadget] = {}
    for i in range(1, k + 2):
        for j in range(1, k + 1):
            src = list(mains[(i - 1, j)].bottom) if i >= 2 else None
            snk = list(mains[(i, j)].top) if i <= k else None
            vcg[(i, j)] = build_connector(n, builder=bld, source_glue=src,
                                          sink_glue=snk, tag=f"VCG[{i},{j}]")

    x_star = bld.add_vertex("x*")
    y_star = bld.add_vertex("y*")
    hub_arcs: dict[str, int] = {}
    hub_arcs["x*->y*"] = bld.add_arc(x_star, y_star, 0)
    entry_arcs: dict[tuple[str, int, int, int], int] = {}
    for j in range(1, k + 1):
        for m in range(1, n + 1):
            entry_arcs[("v-in", 1, j, m)] = bld.add_arc(
                y_star, vcg[(1, j)].sources[m - 1], 0)
            entry_arcs[("v-out", k + 1, j, m)] = bld.add_arc(
                vcg[(k + 1, j)].sinks[m - 1], x_star, 0)
    for i in range(1, k + 1):
        for m in range(1, n + 1):
            entry_arcs[("h-in", i, 1, m)] = bld.add_arc(
                y_star, hcg[(i, 1)].sources[m - 1], 0)
            entry_arcs[("h-out", i, k + 1, m)] = bld.add_arc(
                hcg[(i, k + 1)].sinks[m - 1], x_star, 0)

    graph = bld.freeze()
    for g in list(mains.values()) + list(hcg.values()) + list(vcg.values()):
        g.graph = graph

    terminals = [x_star, y_star]
    for i in range(1, k + 1):
        for j in range(1, k + 2):
            terminals.extend((hcg[(i, j)].p, hcg[(i, j)].q))
    for i in range(1, k + 2):
        for j in range(1, k + 1):
            terminals.extend((vcg[(i, j)].p, vcg[(i, j)].q))
    assert len(terminals) == 4 * k * (k + 1) + 2

    budget = k * k * main_target(n) + 2 * k * (k + 1) * connector_target(n)
    artifact = ReductionArtifact(
        instance=ScssInstance(graph, tuple(terminals)),
        budget=budget,
        vertex_provenance={},
        arc_provenance={},
        meta={"k": k, "n": n, "kind": "scss-planar",
              "terminal_count": len(terminals),
              "main_target": main_target(n),
              "connector_target": connector_target(n)},
    )
    for key, g in mains.items():
        artifact.gadgets[g.tag] = g
        _gadget_provenance(artifact, g, graph)
    for key, g in list(hcg.items()) + list(vcg.items()):
        artifact.gadgets[g.tag] = g
        _gadget_provenance(artifact, g, graph)
    artifact.gadgets["_hubs"] = (x_star, y_star)
    artifact.gadgets["_entry_arcs"] = entry_arcs
    artifact.gadgets["_hub_arcs"] = hub_arcs
    for key, a in entry_arcs.items():
        artifact.arc_provenance[a] = ("hub", str(key))
    artifact.arc_provenance[hub_arcs["x*->y*"]] = ("hub", "x*->y*")
    artifact.vertex_provenance[x_star] = (("hub", "x*"),)
    artifact.vertex_provenance[y_star] = (("hub", "y*"),)
    return artifact


def scss_witness(artifact: ReductionArtifact,
                 assignment: GridTilingAssignment,
                 gt: GridTilingInstance) -> EdgeSolution:
    """The constructive solution E*: weight exactly W*_n, validates."""
    if not check_gridtiling(gt, assignment):
        raise ReductionError("assignment invalid for the source instance")
    k = gt.k
    alpha = assignment.row_values()
    beta = assignment.column_values()
    entry = artifact.gadgets["_entry_arcs"]
    hub = artifact.gadgets["_hub_arcs"]
    arcs: set[int] = {hub["x*->y*"]}
    for j in range(1, k + 1):
        arcs.add(entry[("v-in", 1, j, beta[j - 1])])
        arcs.add(entry[("v-out", k + 1, j, beta[j - 1])])
    for i in range(1, k + 1):
        arcs.add(entry[("h-in", i, 1, alpha[i - 1])])
        arcs.add(entry[("h-out", i, k + 1, alpha[i - 1])])
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            mg = artifact.gadgets[f"MG[{i},{j}]"]
            arcs |= main_canonical(mg, (alpha[i - 1], beta[j - 1])).arcs
    for i in range(1, k + 1):
        for j in range(1, k + 2):
            cg = artifact.gadgets[f"HCG[{i},{j}]"]
            arcs |= connector_canonical(cg, alpha[i - 1]).arcs
    for i in range(1, k + 2):
        for j in range(1, k + 1):
            cg = artifact.gadgets[f"VCG[{i},{j}]"]
            arcs |= connector_canonical(cg, beta[j - 1]).arcs
    return EdgeSolution.of(artifact.instance.graph, arcs)


@dataclass
class GadgetInterfaceReport:
    connected: dict[str, bool]
    weights: dict[str, int]

    @property
    def all_connected(self) -> bool:
        return all(self.connected.values())


def check_gadget_interface(artifact: ReductionArtifact,
                           sol: EdgeSolution) -> GadgetInterfaceReport:
    """Per-gadget connectedness and weight of a candidate solution,
    implementing the accounting step of the hard direction."""
    connected: dict[str, bool] = {}
    weights: dict[str, int] = {}
    graph = artifact.instance.graph
    for tag, g in artifact.gadgets.items():
        if tag.startswith("_"):
            continue
        part = sol.arcs & g.arcs
        weights[tag] = graph.total_weight(part)
        if isinstance(g, ConnectorGadget):
            connected[tag] = connector_connectedness(g, part)
        else:
            connected[tag] = main_connectedness(g, part)
    return GadgetInterfaceReport(connected, weights)


# -- PSI -> SCSS -----------------------------------------------------------


def reduce_psi_to_scss(psi: PsiInstance) -> ReductionArtifact:
    """Unit-weight SCSS instance with terminals B u F and budget
    3*ell + 10*|E_G| (solution size counts edges)."""
    ell = psi.ell
    bld = GraphBuilder()
    b_v = {i: bld.add_vertex(f"b_{i}") for i in range(1, ell + 1)}
    c_v = {v: bld.add_vertex(f"c_{v}") for v in psi.host_vertices}
    h_v = {v: bld.add_vertex(f"h_{v}") for v in psi.host_vertices}
    oriented = []
    for (a, bnd) in sorted(psi.host_edges):
        oriented.append((a, bnd))
        oriented.append((bnd, a))
    d_v = {(u, v): bld.add_vertex(f"d_{u}{v}") for (u, v) in oriented}
    a_v = {(u, v): bld.add_vertex(f"a_{u}{v}") for (u, v) in oriented}
    pattern_ordered = []
    for (gi, gj) in sorted(psi.pattern_edges):
        pattern_ordered.append((gi, gj))
        pattern_ordered.append((gj, gi))
    f_v = {(i, j): bld.add_vertex(f"f_{i}{j}") for (i, j) in pattern_ordered}

    arcs: dict[str, dict] = {"E1": {}, "E2": {}, "E3": {}, "E4": {},
                             "E5": {}, "E6": {}, "E7": {}}
    for v in psi.host_vertices:
        i = psi.host_class[v]
        arcs["E1"][(v, i)] = bld.add_arc(c_v[v], b_v[i], 1)
        arcs["E2"][(i, v)] = bld.add_arc(b_v[i], h_v[v], 1)
        arcs["E3"][v] = bld.add_arc(h_v[v], c_v[v], 1)
    for (v, u) in oriented:
        arcs["E4"][(v, u)] = bld.add_arc(c_v[v], d_v[(v, u)], 1)
        arcs["E5"][(v, u)] = bld.add_arc(a_v[(v, u)], h_v[u], 1)
        arcs["E6"][(v, u)] = bld.add_arc(d_v[(v, u)], a_v[(v, u)], 1)
    for (v, u) in oriented:
        i, j = psi.host_class[v], psi.host_class[u]
        if (i, j) in f_v:
            arcs["E7"][("fd", i, j, v, u)] = bld.add_arc(f_v[(i, j)], d_v[(v, u)], 1)
            arcs["E7"][("af", i, j, v, u)] = bld.add_arc(a_v[(v, u)], f_v[(i, j)], 1)

    graph = bld.freeze()
    terminals = tuple(b_v[i] for i in range(1, ell + 1)) + tuple(
        f_v[key] for key in pattern_ordered)
    budget = 3 * ell + 10 * len(psi.pattern_edges)
    artifact = ReductionArtifact(
        instance=ScssInstance(graph, terminals),
        budget=budget,
        vertex_provenance={v: ((label, label),) for v, label in graph.labels.items()},
        arc_provenance={},
        meta={"kind": "psi-scss", "ell": ell,
              "pattern_edge_count": len(psi.pattern_edges),
              "terminal_count": len(terminals),
              "vertex_count": graph.n},
    )
    artifact.gadgets["_maps"] = {
        "b": b_v, "c": c_v, "h": h_v, "d": d_v, "a": a_v, "f": f_v,
        "arcs": arcs,
    }
    for family, entries in arcs.items():
        for key, aid in entries.items():
            artifact.arc_provenance[aid] = (family, str(key))
    return artifact


def psi_witness(artifact: ReductionArtifact, psi: PsiInstance,
                phi: PsiAssignment) -> EdgeSolution:
    """M' = M1 u ... u M5; exactly 3*ell + 10*|E_G| unit arcs."""
    if not check_psi(psi, phi):
        raise ReductionError("invalid PSI assignment")
    maps = artifact.gadgets["_maps"]
    arcs_by = maps["arcs"]
    chosen: set[int] = set()
    for i in range(1, psi.ell + 1):
        v = phi.phi[i]
        chosen.add(arcs_by["E3"][v])                  # (h_phi(gi), c_phi(gi))
        chosen.add(arcs_by["E2"][(i, v)])             # (b_i, h_phi(gi))
        chosen.add(arcs_by["E1"][(v, i)])             # (c_phi(gi), b_i)
    ordered_pattern = []
    for (gi, gj) in psi.pattern_edges:
        ordered_pattern.append((gi, gj))
        ordered_pattern.append((gj, gi))
    for (i, j) in ordered_pattern:
        u, v = phi.phi[i], phi.phi[j]
        chosen.add(arcs_by["E4"][(u, v)])
        chosen.add(arcs_by["E6"][(u, v)])
        chosen.add(arcs_by["E5"][(u, v)])
        chosen.add(arcs_by["E7"][("fd", i, j, u, v)])
        chosen.add(arcs_by["E7"][("af", i, j, u, v)])
    sol = EdgeSolution.of(artifact.instance.graph, chosen)
    assert len(sol.arcs) == artifact.budget
    return sol


# -- Grid Tiling -> DSN on planar DAGs --------------------------------------


def _require_dsn_normalized(gt: GridTilingInstance) -> None:
    for i in range(1, gt.k + 1):
        for j in range(1, gt.k + 1):
            for (x, y) in gt.cell(i, j):
                if min(x, y) <= 1:
                    raise ReductionError(
                        f"cell ({i},{j}) entry {(x, y)} touches the border; "
                        "apply normalize_gridtiling(shift=1) first")


def dsn_budget(k: int, n: int) -> int:
    delta = 5 * n * n
    return 2 * k * (delta * (n + 1) + 2 * (k + 1) + 2 * k * (n - 1))


def reduce_gt_to_dsn(gt: GridTilingInstance) -> ReductionArtifact:
    """Grid Tiling -> DSN on a planar DAG with 2k demands."""
    _require_dsn_normalized(gt)
    k, n = gt.k, gt.n
    if k > n:
        raise ReductionError("construction assumes k <= n")
    delta = 5 * n * n
    bld = GraphBuilder()

    a_t = {i: bld.add_vertex(f"a_{i}") for i in range(1, k + 1)}
    b_t = {i: bld.add_vertex(f"b_{i}") for i in range(1, k + 1)}
    c_t = {j: bld.add_vertex(f"c_{j}") for j in range(1, k + 1)}
    d_t = {j: bld.add_vertex(f"d_{j}") for j in range(1, k + 1)}
    hs = {(i, l): bld.add_vertex(f"hs_{i}^{l}")
          for i in range(1, k + 1) for l in range(1, n + 1)}
    ht = {(i, l): bld.add_vertex(f"ht_{i}^{l}")
          for i in range(1, k + 1) for l in range(1, n + 1)}
    vs = {(j, l): bld.add_vertex(f"vs_{j}^{l}")
          for j in range(1, k + 1) for l in range(1, n + 1)}
    vt = {(j, l): bld.add_vertex(f"vt_{j}^{l}")
          for j in range(1, k + 1) for l in range(1, n + 1)}
    grid = {(i, j, x, y): bld.add_vertex(f"G[{i},{j}]:v_{x}^{y}")
            for i in range(1, k + 1) for j in range(1, k + 1)
            for x in range(1, n + 1) for y in range(1, n + 1)}
    greens = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            for (x, y) in sorted(gt.cell(i, j)):
                greens[(i, j, x, y)] = bld.add_vertex(f"G[{i},{j}]:green_{x}^{y}")

    hpath: dict[tuple[int, int], list[int]] = {}
    hpath_arc_into: dict[tuple[int, int, int, int], int] = {}
    for i in range(1, k + 1):
        for l in range(1, n + 1):
            path = [bld.add_arc(a_t[i], hs[(i, l)], delta * (n + 1 - l))]
            path.append(bld.add_arc(hs[(i, l)], grid[(i, 1, l, 1)], 2))
            for j in range(1, k + 1):
                for y in range(1, n):
                    aid = bld.add_arc(grid[(i, j, l, y)], grid[(i, j, l, y + 1)], 2)
                    path.append(aid)
                    hpath_arc_into[(i, j, l, y + 1)] = aid
                if j < k:
                    path.append(bld.add_arc(grid[(i, j, l, n)],
                                            grid[(i, j + 1, l, 1)], 2))
            path.append(bld.add_arc(grid[(i, k, l, n)], ht[(i, l)], 2))
            path.append(bld.add_arc(ht[(i, l)], b_t[i], delta * l))
            hpath[(i, l)] = path

    vpath: dict[tuple[int, int], list[int]] = {}
    vpath_arcs_into: dict[tuple[int, int, int, int], tuple[int, ...]] = {}
    for j in range(1, k + 1):
        for l in range(1, n + 1):
            path = [bld.add_arc(c_t[j], vs[(j, l)], delta * (n + 1 - l))]
            path.append(bld.add_arc(vs[(j, l)], grid[(1, j, 1, l)], 2))
            for i in range(1, k + 1):
                for x in range(1, n):
                    if (i, j, x + 1, l) in greens:
                        mid = greens[(i, j, x + 1, l)]
                        a1 = bld.add_arc(grid[(i, j, x, l)], mid, 1)
                        a2 = bld.add_arc(mid, grid[(i, j, x + 1, l)], 1)
                        path.extend((a1, a2))
                        vpath_arcs_into[(i, j, x + 1, l)] = (a1, a2)
                    else:
                        aid = bld.add_arc(grid[(i, j, x, l)],
                                          grid[(i, j, x + 1, l)], 2)
                        path.append(aid)
                        vpath_arcs_into[(i, j, x + 1, l)] = (aid,)
                if i < k:
                    path.append(bld.add_arc(grid[(i, j, n, l)],
                                            grid[(i + 1, j, 1, l)], 2))
            path.append(bld.add_arc(grid[(k, j, n, l)], vt[(j, l)], 2))
            path.append(bld.add_arc(vt[(j, l)], d_t[j], delta * l))
            vpath[(j, l)] = path

    green_arc: dict[tuple[int, int, int, int], int] = {}
    for (i, j, x, y), mid in greens.items():
        # u: predecessor of the green vertex on the horizontal path P_i^x.
        u = grid[(i, j, x, y - 1)]
        green_arc[(i, j, x, y)] = bld.add_arc(u, mid, 1)

    graph = bld.freeze()
    demands = tuple((a_t[i], b_t[i]) for i in range(1, k + 1)) + tuple(
        (c_t[j], d_t[j]) for j in range(1, k + 1))
    budget = dsn_budget(k, n)
    artifact = ReductionArtifact(
        instance=DsnInstance(graph, demands),
        budget=budget,
        vertex_provenance={v: ((lab.split(":")[0], lab),)
                           for v, lab in graph.labels.items()},
        arc_provenance={},
        meta={"kind": "dsn-planar", "k": k, "n": n, "delta": delta,
              "budget_b_star": budget, "threshold": budget - k * k},
    )
    artifact.gadgets["_paths"] = {
        "h": hpath, "v": vpath,
        "h_arc_into": hpath_arc_into, "v_arcs_into": vpath_arcs_into,
        "green_arc": green_arc,
    }
    for (key, arcs) in list(hpath.items()):
        for aid in arcs:
            artifact.arc_provenance[aid] = ("P", f"P_{key[0]}^{key[1]}")
    for (key, arcs) in list(vpath.items()):
        for aid in arcs:
            artifact.arc_provenance[aid] = ("Q", f"Q_{key[0]}^{key[1]}")
    for key, aid in green_arc.items():
        artifact.arc_provenance[aid] = ("green", str(key))
    return artifact


def dsn_witness(artifact: ReductionArtifact, gt: GridTilingInstance,
                assignment: GridTilingAssignment) -> EdgeSolution:
    """Canonical vertical paths plus almost-canonical horizontal paths that
    take every green shortcut: weight exactly B* - k^2."""
    if not check_gridtiling(gt, assignment):
        raise ReductionError("assignment invalid for the source instance")
    k = gt.k
    alpha = assignment.row_values()
    gamma = assignment.column_values()
    paths = artifact.gadgets["_paths"]
    arcs: set[int] = set()
    for j in range(1, k + 1):
        arcs.update(paths["v"][(j, gamma[j - 1])])
    for i in range(1, k + 1):
        arcs.update(paths["h"][(i, alpha[i - 1])])
        for j in range(1, k + 1):
            key = (i, j, alpha[i - 1], gamma[j - 1])
            # Swap the horizontal arc into the green vertex for the green
            # shortcut; the second half of the split vertical edge is shared.
            arcs.discard(paths["h_arc_into"][key])
            arcs.add(paths["green_arc"][key])
    return EdgeSolution.of(artifact.instance.graph, arcs)
