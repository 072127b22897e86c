"""Exact SCSS by dynamic programming over a tree decomposition of the
input graph.

Any feasible solution contains, and any optimal solution is, the union of an
out-arborescence from a root terminal r covering T and an in-arborescence to
r covering T; the two may share arcs, which are paid once.  The DP therefore
tracks a pair of rooted-forest states over the bag:

* which bag vertices participate in A_out / A_in,
* which of them already have their unique parent arc (A_out) or unique
  outgoing arc towards r (A_in),
* the partition of participants into weakly connected forest components,
  each flagged rooted once it contains r's tree.

Arcs are introduced at dedicated nodes with a four-way decision (unused /
A_out / A_in / both); the weight is paid once for any use.  A pending
component's local root must still sit in the bag (otherwise it can never be
attached and the state dies), which keeps all bookkeeping bag-local.

This state design is ours; only the external contract (exact optimum on a
valid decomposition of the input graph) comes from the problem statement.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bnb import INFEASIBLE, OPTIMAL, SolveResult
from .graph import EdgeSolution, ScssInstance, validate_scss
from .treewidth import TreeDecomposition, TreewidthError

LEAF, INTRODUCE, FORGET, JOIN, ARC = "leaf", "introduce", "forget", "join", "arc"


@dataclass
class _Node:
    kind: str
    bag: frozenset[int]
    children: tuple[int, ...]
    payload: object = None  # vertex for introduce/forget, arc id for arc


def _build_nice_tree(td: TreeDecomposition, arcs) -> tuple[list[_Node], int]:
    nodes: list[_Node] = []

    def add(kind, bag, children, payload=None) -> int:
        nodes.append(_Node(kind, frozenset(bag), tuple(children), payload))
        return len(nodes) - 1

    def chain_introduce(bag_from: frozenset, bag_to: frozenset, below: int) -> int:
        cur, bag = below, set(bag_from)
        for v in sorted(bag_to - bag_from):
            bag.add(v)
            cur = add(INTRODUCE, bag, (cur,), v)
        return cur

    def chain_forget(bag_from: frozenset, bag_to: frozenset, below: int) -> int:
        cur, bag = below, set(bag_from)
        for v in sorted(bag_from - bag_to):
            bag.discard(v)
            cur = add(FORGET, bag, (cur,), v)
        return cur

    def adjust(bag_from: frozenset, bag_to: frozenset, below: int) -> int:
        mid = chain_forget(bag_from, bag_from & bag_to, below)
        return chain_introduce(bag_from & bag_to, bag_to, mid)

    ntree: dict[int, list[int]] = {i: [] for i in range(len(td.bags))}
    for (a, b) in td.tree_edges:
        ntree[a].append(b)
        ntree[b].append(a)

    def build(bag_id: int, parent: Optional[int]) -> int:
        bag = td.bags[bag_id]
        kids = [c for c in ntree[bag_id] if c != parent]
        if not kids:
            leaf = add(LEAF, frozenset(), ())
            return chain_introduce(frozenset(), bag, leaf)
        subs = [adjust(td.bags[c], bag, build(c, bag_id)) for c in kids]
        cur = subs[0]
        for nxt in subs[1:]:
            cur = add(JOIN, bag, (cur, nxt))
        return cur

    root_bag = 0 if td.bags else None
    if root_bag is None:
        top = add(LEAF, frozenset(), ())
    else:
        top = chain_forget(td.bags[0], frozenset(), build(0, None))

    # Splice one ARC node per usable arc above the first node (post-order)
    # whose bag holds both endpoints.
    order = []

    def post(i: int):
        for c in nodes[i].children:
            post(c)
        order.append(i)

    post(top)
    parent_of: dict[int, tuple[int, int]] = {}
    for i, nd in enumerate(nodes):
        for slot, c in enumerate(nd.children):
            parent_of[c] = (i, slot)
    for aid, (u, v, _w) in enumerate(arcs):
        if u == v:
            continue
        spot = next((i for i in order if {u, v} <= nodes[i].bag), None)
        if spot is None:
            raise TreewidthError(f"no bag contains both endpoints of arc {aid}")
        new = add(ARC, nodes[spot].bag, (spot,), aid)
        if spot in parent_of:
            p, slot = parent_of[spot]
            ch = list(nodes[p].children)
            ch[slot] = new
            nodes[p] = _Node(nodes[p].kind, nodes[p].bag, tuple(ch), nodes[p].payload)
            parent_of[new] = (p, slot)
        else:
            top = new
        parent_of[spot] = (new, 0)
        order.insert(order.index(spot) + 1, new)
    return nodes, top


# Forest-side state: (sel, flagged, blocks) with blocks a frozenset of
# (members, rooted); ``flagged`` marks vertices whose tree arc towards the
# structure's root side is already fixed (parent in A_out, out-arc in A_in).
_EMPTY_SIDE = (frozenset(), frozenset(), frozenset())


def _side_introduce(side, v, selected, is_root):
    sel, flagged, blocks = side
    if not selected:
        return side
    return (sel | {v}, flagged, blocks | {(frozenset((v,)), is_root)})


def _side_forget(side, v, root):
    sel, flagged, blocks = side
    if v not in sel:
        return side
    if v not in flagged and v != root:
        return None  # pending local root leaves the bag: unattachable
    new_blocks = set()
    for (members, rooted) in blocks:
        if v in members:
            rest = members - {v}
            if rest:
                new_blocks.add((rest, rooted))
            elif not rooted:
                return None
        else:
            new_blocks.add((members, rooted))
    return (sel - {v}, flagged - {v}, frozenset(new_blocks))


def _side_use_arc(side, u, v, root):
    """Attach arc so that v gains its tree arc towards u's component."""
    sel, flagged, blocks = side
    if u not in sel or v not in sel:
        return None
    if v in flagged or v == root:
        return None
    bu = bv = None
    for blk in blocks:
        if u in blk[0]:
            bu = blk
        if v in blk[0]:
            bv = blk
    if bu is bv:
        return None  # would close a cycle
    assert not bv[1], "pending component expected on the attached side"
    merged = (bu[0] | bv[0], bu[1])
    return (sel, flagged | {v}, (blocks - {bu, bv}) | {merged})


def _side_join(left, right, root):
    sel_l, flag_l, blocks_l = left
    sel_r, flag_r, blocks_r = right
    if sel_l != sel_r or (flag_l & flag_r):
        return None
    parent = {v: v for v in sel_l}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    rooted_reps = set()
    for (members, rooted) in list(blocks_l) + list(blocks_r):
        it = iter(members)
        first = next(it)
        for other in it:
            ra, rb = find(first), find(other)
            if ra == rb:
                return None  # union of two forests closes a cycle
            parent[ra] = rb
        if rooted:
            rooted_reps.add(first)
    groups: dict[int, set[int]] = {}
    for v in sel_l:
        groups.setdefault(find(v), set()).add(v)
    rooted_roots = {find(v) for v in rooted_reps}
    flagged = flag_l | flag_r
    blocks = set()
    for rep, members in groups.items():
        rooted = rep in rooted_roots
        if not rooted:
            pending_free = [v for v in members if v not in flagged and v != root]
            if len(pending_free) != 1:
                return None
        blocks.add((frozenset(members), rooted))
    return (sel_l, flagged, frozenset(blocks))


def scss_treewidth_dp(instance: ScssInstance,
                      decomposition: TreeDecomposition) -> SolveResult:
    """Optimal SCSS weight via DP over ``decomposition`` of the input graph."""
    graph = instance.graph
    decomposition.validate(range(graph.n), graph.undirected_simple_edges())
    if instance.k == 1:
        return SolveResult(OPTIMAL, 0, EdgeSolution.of(graph, ()))
    root = instance.terminals[0]
    required = set(instance.terminals)
    nodes, top = _build_nice_tree(decomposition, graph.arcs)

    # table[node] maps (out_side, in_side) -> (cost, backpointer); the
    # backpointer records enough to rebuild arc decisions.
    table: list[Optional[dict]] = [None] * len(nodes)

    def solve(i: int) -> dict:
        if table[i] is not None:
            return table[i]
        nd = nodes[i]
        out: dict = {}

        def push(state, cost, bp):
            cur = out.get(state)
            if cur is None or cost < cur[0]:
                out[state] = (cost, bp)

        if nd.kind == LEAF:
            push((_EMPTY_SIDE, _EMPTY_SIDE), 0, None)
        elif nd.kind == INTRODUCE:
            v = nd.payload
            child = solve(nd.children[0])
            is_term = v in required
            combos = ((True, True),) if is_term else \
                ((False, False), (True, False), (False, True), (True, True))
            for state, (cost, _bp) in child.items():
                for in_out, in_in in combos:
                    s_out = _side_introduce(state[0], v, in_out, v == root)
                    s_in = _side_introduce(state[1], v, in_in, v == root)
                    push((s_out, s_in), cost, (state,))
        elif nd.kind == FORGET:
            v = nd.payload
            child = solve(nd.children[0])
            for state, (cost, _bp) in child.items():
                if v in required and (v not in state[0][0] or v not in state[1][0]):
                    continue
                s_out = _side_forget(state[0], v, root)
                if s_out is None:
                    continue
                s_in = _side_forget(state[1], v, root)
                if s_in is None:
                    continue
                push((s_out, s_in), cost, (state,))
        elif nd.kind == ARC:
            aid = nd.payload
            u, v, w = graph.arcs[aid]
            child = solve(nd.children[0])
            for state, (cost, _bp) in child.items():
                push(state, cost, (state, "none"))
                s_out = _side_use_arc(state[0], u, v, root)
                s_in = _side_use_arc(state[1], v, u, root)
                if s_out is not None:
                    push((s_out, state[1]), cost + w, (state, "out"))
                if s_in is not None:
                    push((state[0], s_in), cost + w, (state, "in"))
                if s_out is not None and s_in is not None:
                    push((s_out, s_in), cost + w, (state, "both"))
        elif nd.kind == JOIN:
            left = solve(nd.children[0])
            right = solve(nd.children[1])
            for ls, (lc, _lb) in left.items():
                for rs, (rc, _rb) in right.items():
                    s_out = _side_join(ls[0], rs[0], root)
                    if s_out is None:
                        continue
                    s_in = _side_join(ls[1], rs[1], root)
                    if s_in is None:
                        continue
                    push((s_out, s_in), lc + rc, (ls, rs))
        table[i] = out
        return out

    import sys
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * len(nodes) + 100))
    try:
        final = solve(top)
    finally:
        sys.setrecursionlimit(old_limit)
    target = (_EMPTY_SIDE, _EMPTY_SIDE)
    if target not in final:
        return SolveResult(INFEASIBLE, None, None)
    best_cost = final[target][0]

    # Rebuild the chosen arc set by replaying back-pointers.
    chosen: set[int] = set()

    def replay(i: int, state) -> None:
        nd = nodes[i]
        entry = table[i][state]
        bp = entry[1]
        if nd.kind == LEAF:
            return
        if nd.kind == JOIN:
            ls, rs = bp
            replay(nd.children[0], ls)
            replay(nd.children[1], rs)
            return
        if nd.kind == ARC:
            child_state, decision = bp
            if decision != "none":
                chosen.add(nd.payload)
            replay(nd.children[0], child_state)
            return
        replay(nd.children[0], bp[0])

    sys.setrecursionlimit(max(old_limit, 4 * len(nodes) + 100))
    try:
        replay(top, target)
    finally:
        sys.setrecursionlimit(old_limit)
    sol = EdgeSolution.of(graph, chosen)
    assert sol.weight == best_cost
    assert validate_scss(instance, sol)
    return SolveResult(OPTIMAL, best_cost, sol)
