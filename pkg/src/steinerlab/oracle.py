"""Optimality oracles for the gadgets.

The gadget lemmas' hard directions (any connectedness-satisfying edge set of
weight <= target has weight exactly the target and represents something) are
not re-proved; at desk scale they are *checked* by exact search.  The
disjunctive connectedness conditions become four concrete demands by wiring
a zero-weight super-source to the allowed start boundary and a zero-weight
super-sink from the allowed end boundary, and the resulting DSN instance is
solved to optimality.  Super arcs never enter representation checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .bnb import OPTIMAL, TIMEOUT, SolveResult, solve_dsn_arcs
from .gadgets import (
    ConnectorGadget,
    MainGadget,
    build_connector,
    build_main,
    connector_canonical,
    connector_represents,
    main_canonical,
    main_represents,
)
from .graph import EdgeSolution, GraphBuilder


@dataclass
class OracleReport:
    kind: str
    n: int
    status: str                 # optimal | timeout
    minimum: Optional[int]
    target: int
    optima_found: int
    representations: tuple[object, ...]
    nodes_explored: int

    @property
    def matches_target(self) -> bool:
        return self.status == OPTIMAL and self.minimum == self.target

    @property
    def all_represent(self) -> bool:
        return all(r is not None for r in self.representations)


def _with_super_vertices(gadget, sources_by_demand, sinks_by_demand):
    """Copy the gadget graph and add one super vertex per boundary group."""
    bld = GraphBuilder()
    g = gadget.graph
    for v in range(g.n):
        bld.add_vertex(g.label(v))
    for (t, h, w) in g.arcs:
        bld.add_arc(t, h, w)
    demands = []
    for sources, sinks in zip(sources_by_demand, sinks_by_demand):
        s = sources if isinstance(sources, int) else None
        t = sinks if isinstance(sinks, int) else None
        if s is None:
            s = bld.add_vertex("super_source")
            for v in sources:
                bld.add_arc(s, v, 0)
        if t is None:
            t = bld.add_vertex("super_sink")
            for v in sinks:
                bld.add_arc(v, t, 0)
        demands.append((s, t))
    return bld.freeze(), demands


def connector_oracle_instance(gadget: ConnectorGadget):
    """Demands: P ~> p, P ~> q, p ~> Q, q ~> Q."""
    graph, demands = _with_super_vertices(
        gadget,
        [list(gadget.sources), list(gadget.sources), gadget.p, gadget.q],
        [gadget.p, gadget.q, list(gadget.sinks), list(gadget.sinks)],
    )
    return graph, demands


def main_oracle_instance(gadget: MainGadget):
    """Demands: L ~> R u B, T ~> R u B, L u T ~> R, L u T ~> B."""
    rb = list(gadget.right) + list(gadget.bottom)
    lt = list(gadget.left) + list(gadget.top)
    graph, demands = _with_super_vertices(
        gadget,
        [list(gadget.left), list(gadget.top), lt, lt],
        [rb, rb, list(gadget.right), list(gadget.bottom)],
    )
    return graph, demands


def gadget_oracle(kind: str, n: int, S: Optional[Iterable[tuple[int, int]]] = None,
                  *, timeout: Optional[float] = None,
                  delete_arcs: Iterable[int] = (),
                  budget_only: Optional[int] = None,
                  allow_border: bool = False):
    """Minimum weight over connectedness-satisfying edge sets, plus the
    representation of every optimum discovered.

    ``delete_arcs`` drops gadget arcs before solving (mutation experiments);
    ``budget_only`` switches to the decision question at that budget.
    Returns (OracleReport | SolveResult-for-decisions, gadget).
    """
    if kind == "connector":
        gadget = build_connector(n)
        graph, demands = connector_oracle_instance(gadget)
        represent = connector_represents
        canonical = None if delete_arcs else connector_canonical(gadget, 1).arcs
    elif kind == "main":
        entries = frozenset(S or ())
        gadget = build_main(n, entries, allow_border=allow_border)
        graph, demands = main_oracle_instance(gadget)
        represent = main_represents
        canonical = None
        if entries and not delete_arcs:
            canonical = main_canonical(gadget, sorted(entries)[0]).arcs
    else:
        raise ValueError(f"unknown gadget kind {kind!r}")

    deleted = frozenset(delete_arcs)
    if deleted:
        # Rebuild without the deleted arcs, preserving arc ids via a map.
        bld = GraphBuilder()
        for v in range(graph.n):
            bld.add_vertex(graph.label(v))
        keep = {}
        for aid, (t, h, w) in enumerate(graph.arcs):
            if aid not in deleted:
                keep[bld.add_arc(t, h, w)] = aid
        graph2 = bld.freeze()
        res = solve_dsn_arcs(graph2, demands, timeout=timeout,
                             budget_only=budget_only,
                             collect_optima=budget_only is None)
        remap = keep
    else:
        res = solve_dsn_arcs(graph, demands, timeout=timeout,
                             budget_only=budget_only,
                             seed_solution=canonical,
                             collect_optima=budget_only is None)
        remap = {a: a for a in range(len(graph.arcs))}

    if budget_only is not None:
        return res, gadget

    if res.status == TIMEOUT:
        report = OracleReport(kind, n, TIMEOUT, None, gadget.target_weight, 0, (),
                              res.nodes_explored)
        return report, gadget

    reps = []
    for opt in res.optima:
        original = {remap[a] for a in opt.arcs}
        gadget_part = frozenset(original) & gadget.arcs
        reps.append(represent(gadget, gadget_part))
    report = OracleReport(kind, n, res.status, res.weight, gadget.target_weight,
                          len(res.optima), tuple(reps), res.nodes_explored)
    return report, gadget
