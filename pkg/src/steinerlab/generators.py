"""Seeded random instance generators for the verification sweeps.

Planar SCSS instances come from Delaunay triangulations of random points
(planar by construction); treewidth-2 graphs from random series-parallel
growth; generic digraph instances from plain seeded sampling.  All functions
are deterministic in their seed.
"""
from __future__ import annotations

import random
from typing import Optional

from .graph import (
    DsnInstance,
    GraphBuilder,
    ScssInstance,
    WeightedDigraph,
    strongly_connected_terminals,
)


def random_digraph(seed: int, nv: int, narcs: int, wmax: int = 5,
                   allow_zero: bool = True) -> WeightedDigraph:
    rng = random.Random(seed)
    bld = GraphBuilder()
    for _ in range(nv):
        bld.add_vertex()
    lo = 0 if allow_zero else 1
    for _ in range(narcs):
        bld.add_arc(rng.randrange(nv), rng.randrange(nv), rng.randint(lo, wmax))
    return bld.freeze()


def random_scss_instance(seed: int, nv: int, narcs: int, k: int,
                         wmax: int = 5, feasible: Optional[bool] = None,
                         max_tries: int = 500) -> ScssInstance:
    rng = random.Random(seed)
    for attempt in range(max_tries):
        g = random_digraph(rng.randrange(2**30), nv, narcs, wmax)
        terms = tuple(rng.sample(range(nv), k))
        inst = ScssInstance(g, terms)
        if feasible is None:
            return inst
        if strongly_connected_terminals(g, terms) == feasible:
            return inst
    raise RuntimeError("could not sample an instance with the requested feasibility")


def random_dst_instance(seed: int, nv: int, narcs: int, k: int, wmax: int = 5):
    """(graph, root, terminals) with every terminal reachable from the root."""
    rng = random.Random(seed)
    while True:
        g = random_digraph(rng.randrange(2**30), nv, narcs, wmax)
        root = rng.randrange(nv)
        terms = rng.sample([v for v in range(nv) if v != root],
                           min(k, nv - 1))
        from .graph import reachable_set

        if set(terms) <= reachable_set(g, range(len(g.arcs)), root):
            return g, root, tuple(terms)


def random_planar_scss(seed: int, npoints: int, k: int, wmax: int = 4,
                       drop_prob: float = 0.25) -> ScssInstance:
    """Planar feasible instance from a Delaunay triangulation.

    Each triangulation edge yields one or two directed arcs with random
    weights; dropped reverse arcs are re-added where needed to keep the
    terminals strongly connected.
    """
    import numpy as np
    from scipy.spatial import Delaunay

    rng = random.Random(seed)
    npr = np.random.RandomState(seed)
    while True:
        pts = npr.rand(npoints, 2)
        try:
            tri = Delaunay(pts)
        except Exception:
            continue
        edges = set()
        for simplex in tri.simplices:
            for i in range(3):
                a, b = int(simplex[i]), int(simplex[(i + 1) % 3])
                edges.add((min(a, b), max(a, b)))
        bld = GraphBuilder()
        for _ in range(npoints):
            bld.add_vertex()
        for (a, b) in sorted(edges):
            if rng.random() >= drop_prob:
                bld.add_arc(a, b, rng.randint(0, wmax))
            if rng.random() >= drop_prob:
                bld.add_arc(b, a, rng.randint(0, wmax))
        g = bld.freeze()
        terms = tuple(rng.sample(range(npoints), k))
        if strongly_connected_terminals(g, terms):
            return ScssInstance(g, terms)


def random_tw2_graph(seed: int, steps: int) -> tuple[list[int], set[frozenset[int]]]:
    """Series-parallel style growth; result always has treewidth <= 2."""
    rng = random.Random(seed)
    vertices = [0, 1]
    edges = {frozenset((0, 1))}
    nxt = 2
    for _ in range(steps):
        op = rng.random()
        if op < 0.4 and edges:
            u, v = tuple(rng.choice(sorted(tuple(sorted(e)) for e in edges)))
            edges.discard(frozenset((u, v)))
            edges.add(frozenset((u, nxt)))
            edges.add(frozenset((nxt, v)))
        elif op < 0.8 and edges:
            u, v = tuple(rng.choice(sorted(tuple(sorted(e)) for e in edges)))
            edges.add(frozenset((u, nxt)))
            edges.add(frozenset((nxt, v)))
        else:
            u = rng.choice(vertices)
            edges.add(frozenset((u, nxt)))
        vertices.append(nxt)
        nxt += 1
    return vertices, edges


def random_undirected_edges(seed: int, n: int, p: float) -> set[frozenset[int]]:
    rng = random.Random(seed)
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add(frozenset((u, v)))
    return edges
