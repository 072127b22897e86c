"""Line-oriented text formats for instances, problems and solutions.

Instance format::

    # comment
    V <count>
    L <id> <label>          (optional, any number)
    A <tail> <head> <weight>
    T <id> <id> ...         (SCSS terminals; single logical list)
    D <s> <t>               (DSN demand, one per line)

Weights are decimal nonnegative integers up to 2^63-1.  Exactly one of T/D
must appear.  Serialization emits a canonical form (V, sorted L, A in arc
order, then T or D lines); parse(serialize(x)) == x.

Grid Tiling format: header ``GT k n`` then one line per cell
``i j x1,y1;x2,y2;...``.  PSI format: ``PSI l``, ``GE a b`` per pattern edge,
``HV id class``, ``HE a b``.
"""
from __future__ import annotations

from typing import Union

from .graph import (
    MAX_WEIGHT,
    DsnInstance,
    GraphBuilder,
    GraphError,
    ScssInstance,
    WeightedDigraph,
)
from .problems import GridTilingInstance, PsiInstance

Instance = Union[ScssInstance, DsnInstance]


class FormatError(ValueError):
    """Malformed input text."""


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


def parse_instance(text: str) -> Instance:
    nvertices = None
    labels: dict[int, str] = {}
    arcs: list[tuple[int, int, int]] = []
    terminals: list[int] = []
    demands: list[tuple[int, int]] = []

    def vid(tok: str, lineno: int) -> int:
        try:
            v = int(tok)
        except ValueError:
            raise FormatError(f"line {lineno}: bad vertex id {tok!r}")
        if nvertices is None or not (0 <= v < nvertices):
            raise FormatError(f"line {lineno}: dangling vertex reference {v}")
        return v

    for lineno, parts in _content_lines(text):
        tag = parts[0]
        if tag == "V":
            if nvertices is not None or len(parts) != 2:
                raise FormatError(f"line {lineno}: malformed V line")
            nvertices = int(parts[1])
            if nvertices < 0:
                raise FormatError(f"line {lineno}: negative vertex count")
        elif tag == "L":
            if len(parts) < 3:
                raise FormatError(f"line {lineno}: malformed L line")
            labels[vid(parts[1], lineno)] = " ".join(parts[2:])
        elif tag == "A":
            if len(parts) != 4:
                raise FormatError(f"line {lineno}: malformed A line")
            t, h = vid(parts[1], lineno), vid(parts[2], lineno)
            try:
                w = int(parts[3])
            except ValueError:
                raise FormatError(f"line {lineno}: bad weight {parts[3]!r}")
            if w < 0:
                raise FormatError(f"line {lineno}: negative weight")
            if w > MAX_WEIGHT:
                raise FormatError(f"line {lineno}: weight exceeds 2^63-1")
            arcs.append((t, h, w))
        elif tag == "T":
            terminals.extend(vid(tok, lineno) for tok in parts[1:])
        elif tag == "D":
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: malformed D line")
            demands.append((vid(parts[1], lineno), vid(parts[2], lineno)))
        else:
            raise FormatError(f"line {lineno}: unknown directive {tag!r}")

    if nvertices is None:
        raise FormatError("missing V line")
    if bool(terminals) == bool(demands):
        raise FormatError("instance must have exactly one of T / D sections")
    builder = GraphBuilder()
    for v in range(nvertices):
        builder.add_vertex(labels.get(v))
    for t, h, w in arcs:
        builder.add_arc(t, h, w)
    graph = builder.freeze()
    try:
        if terminals:
            return ScssInstance(graph, tuple(terminals))
        return DsnInstance(graph, tuple(demands))
    except GraphError as e:
        raise FormatError(str(e))


def serialize_instance(instance: Instance) -> str:
    g = instance.graph
    lines = [f"V {g.n}"]
    for v in sorted(g.labels):
        lines.append(f"L {v} {g.labels[v]}")
    for (t, h, w) in g.arcs:
        lines.append(f"A {t} {h} {w}")
    if isinstance(instance, ScssInstance):
        lines.append("T " + " ".join(str(t) for t in instance.terminals))
    else:
        for s, t in instance.demands:
            lines.append(f"D {s} {t}")
    return "\n".join(lines) + "\n"


def serialize_solution(sol_arcs) -> str:
    ids = sorted(sol_arcs)
    return "S " + " ".join(str(a) for a in ids) + "\n" if ids else "S\n"


def parse_solution(text: str, graph: WeightedDigraph):
    from .graph import EdgeSolution

    arcs: list[int] = []
    for lineno, parts in _content_lines(text):
        if parts[0] != "S":
            raise FormatError(f"line {lineno}: expected S line")
        for tok in parts[1:]:
            a = int(tok)
            if not (0 <= a < len(graph.arcs)):
                raise FormatError(f"line {lineno}: arc id {a} out of range")
            arcs.append(a)
    return EdgeSolution.of(graph, arcs)


def parse_gridtiling(text: str) -> GridTilingInstance:
    lines = _content_lines(text)
    if not lines or lines[0][1][0] != "GT":
        raise FormatError("missing GT header")
    header = lines[0][1]
    if len(header) != 3:
        raise FormatError("malformed GT header")
    k, n = int(header[1]), int(header[2])
    cells: dict[tuple[int, int], frozenset[tuple[int, int]]] = {}
    for lineno, parts in lines[1:]:
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: malformed cell line")
        i, j = int(parts[0]), int(parts[1])
        pairs = set()
        for chunk in parts[2].split(";"):
            if not chunk:
                continue
            xy = chunk.split(",")
            if len(xy) != 2:
                raise FormatError(f"line {lineno}: bad pair {chunk!r}")
            pairs.add((int(xy[0]), int(xy[1])))
        cells[(i, j)] = frozenset(pairs)
    grid = tuple(
        tuple(cells.get((i, j), frozenset()) for j in range(1, k + 1))
        for i in range(1, k + 1)
    )
    return GridTilingInstance(k, n, grid)


def serialize_gridtiling(inst: GridTilingInstance) -> str:
    lines = [f"GT {inst.k} {inst.n}"]
    for i in range(1, inst.k + 1):
        for j in range(1, inst.k + 1):
            pairs = sorted(inst.cell(i, j))
            body = ";".join(f"{x},{y}" for x, y in pairs)
            lines.append(f"{i} {j} {body}")
    return "\n".join(lines) + "\n"


def parse_psi(text: str) -> PsiInstance:
    lines = _content_lines(text)
    if not lines or lines[0][1][0] != "PSI":
        raise FormatError("missing PSI header")
    ell = int(lines[0][1][1])
    pattern_edges: set[frozenset[int]] = set()
    host_class: dict[str, int] = {}
    host_edges: set[frozenset[str]] = set()
    for lineno, parts in lines[1:]:
        tag = parts[0]
        if tag == "GE":
            pattern_edges.add(frozenset((int(parts[1]), int(parts[2]))))
        elif tag == "HV":
            host_class[parts[1]] = int(parts[2])
        elif tag == "HE":
            if parts[1] not in host_class or parts[2] not in host_class:
                raise FormatError(f"line {lineno}: host edge on undeclared vertex")
            host_edges.add(frozenset((parts[1], parts[2])))
        else:
            raise FormatError(f"line {lineno}: unknown directive {tag!r}")
    return PsiInstance(
        ell=ell,
        pattern_edges=frozenset(tuple(sorted(e)) for e in pattern_edges),
        host_vertices=tuple(sorted(host_class)),
        host_class={v: c for v, c in host_class.items()},
        host_edges=frozenset(tuple(sorted(e)) for e in host_edges),
    )


def serialize_psi(inst: PsiInstance) -> str:
    lines = [f"PSI {inst.ell}"]
    for a, b in sorted(inst.pattern_edges):
        lines.append(f"GE {a} {b}")
    for v in inst.host_vertices:
        lines.append(f"HV {v} {inst.host_class[v]}")
    for a, b in sorted(inst.host_edges):
        lines.append(f"HE {a} {b}")
    return "\n".join(lines) + "\n"
