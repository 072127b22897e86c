"""Named verification experiments tying the modules together.

Each experiment runs a family of cases and aggregates a verdict: PASS only
if every case satisfies its acceptance predicate, INCONCLUSIVE if a solver
timed out (an UNKNOWN never counts as PASS or FAIL), FAIL otherwise.
Verdicts are reproducible bit-for-bit from (name, params): all randomness is
seeded and runtimes are recorded but never consulted.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .bnb import DECISION_NO, DECISION_YES, OPTIMAL, TIMEOUT, exact_dsn, exact_scss
from .dst import dreyfus_wagner_dst, scss_two_approx
from .gadgets import connector_target, main_target
from .generators import (
    random_planar_scss,
    random_scss_instance,
    random_tw2_graph,
    random_undirected_edges,
)
from .graph import is_acyclic, planarity_check, validate_dsn, validate_scss
from .oracle import gadget_oracle
from .problems import (
    GridTilingInstance,
    normalize_gridtiling,
    plant_gridtiling,
    random_psi,
    solve_gridtiling,
    solve_psi,
)
from .reductions import (
    compose_scss,
    dsn_witness,
    reduce_gt_to_dsn,
    reduce_psi_to_scss,
    scss_witness,
)
from .structure import minimalize, treewidth_le_2, verify_structure
from .transforms import solve_vertex_scss, vertexize
from .treewidth import treewidth_exact_edges

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


@dataclass
class CaseRecord:
    case_id: str
    ok: Optional[bool]          # None = unknown (timeout)
    budget: Optional[int] = None
    achieved: Optional[int] = None
    decision: Optional[str] = None
    runtime: float = 0.0
    nodes: int = 0
    note: str = ""


@dataclass
class ExperimentReport:
    name: str
    params: dict
    cases: list[CaseRecord] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if any(c.ok is None for c in self.cases):
            return INCONCLUSIVE
        return PASS if all(c.ok for c in self.cases) else FAIL

    def table(self) -> str:
        lines = [f"# experiment {self.name} params={self.params}"]
        for c in self.cases:
            status = "UNKNOWN" if c.ok is None else ("ok" if c.ok else "FAIL")
            lines.append(
                f"{self.name}\t{c.case_id}\t{status}\tbudget={c.budget}"
                f"\tachieved={c.achieved}\tdecision={c.decision}"
                f"\tnodes={c.nodes}\truntime={c.runtime:.2f}s\t{c.note}")
        lines.append(f"# verdict {self.verdict}")
        return "\n".join(lines)


def _case(report: ExperimentReport, case_id: str, fn: Callable[[], CaseRecord]):
    t0 = time.monotonic()
    rec = fn()
    rec.case_id = case_id
    rec.runtime = time.monotonic() - t0
    report.cases.append(rec)
    return rec


def run_gadget_connector(n: int = 2, timeout: float = 1800.0) -> ExperimentReport:
    report = ExperimentReport("gadget-connector", {"n": n, "timeout": timeout})

    def body():
        res, _g = gadget_oracle("connector", n, timeout=timeout)
        if res.status == TIMEOUT:
            return CaseRecord("", None, budget=res.target, note="timeout")
        ok = res.matches_target and res.all_represent and res.optima_found >= 1
        return CaseRecord("", ok, budget=res.target, achieved=res.minimum,
                          nodes=res.nodes_explored,
                          note=f"optima={res.optima_found} reps={res.representations}")

    _case(report, f"connector-n{n}", body)
    return report


def run_gadget_main(n: int = 2, S=None, timeout: float = 1800.0,
                    allow_border: bool = False) -> ExperimentReport:
    if S is None:
        S, allow_border = {(1, 2)}, True
    report = ExperimentReport("gadget-main",
                              {"n": n, "S": sorted(S), "timeout": timeout})

    def body():
        res, _g = gadget_oracle("main", n, S=S, timeout=timeout,
                                allow_border=allow_border)
        if res.status == TIMEOUT:
            return CaseRecord("", None, budget=res.target, note="timeout")
        ok = res.matches_target and res.all_represent and res.optima_found >= 1
        return CaseRecord("", ok, budget=res.target, achieved=res.minimum,
                          nodes=res.nodes_explored,
                          note=f"optima={res.optima_found} reps={res.representations}")

    _case(report, f"main-n{n}", body)
    return report


def _border_gt_n2(seed: int, k: int) -> GridTilingInstance:
    """Direct n=2 instance over the structurally buildable entries; interior
    of [2] is empty, so this realizes the n=2 composition via the border
    escape hatch (only used by desk-scale experiments)."""
    import random as _random

    rng = _random.Random(seed)
    common = rng.choice([(1, 2), (2, 1)])
    other = (2, 1) if common == (1, 2) else (1, 2)
    cells = []
    for _i in range(k):
        row = []
        for _j in range(k):
            cell = {common}
            if rng.random() < 0.5:
                cell.add(other)
            row.append(frozenset(cell))
        cells.append(tuple(row))
    return GridTilingInstance(k, 2, tuple(cells))


def run_scss_constructive(k: int = 2, n_values=(2, 3), seeds=range(10)) -> ExperimentReport:
    report = ExperimentReport("scss-constructive",
                              {"k": k, "n_values": tuple(n_values),
                               "seeds": tuple(seeds)})
    for n in n_values:
        for seed in seeds:
            def body(n=n, seed=seed):
                if n == 2:
                    gt = _border_gt_n2(seed, k)
                    art = compose_scss(gt, allow_border=True)
                else:
                    pre = plant_gridtiling(seed, k, n - 2, noise=1, answer="yes") \
                        if n - 2 >= 2 else _trivial_pre_gt(k, n - 2)
                    gt = normalize_gridtiling(pre, 2)
                    art = compose_scss(gt)
                asg = solve_gridtiling(gt)
                wit = scss_witness(art, asg, gt)
                expected = k * k * main_target(n) + 2 * k * (k + 1) * connector_target(n)
                ok = (wit.weight == art.budget == expected
                      and art.meta["terminal_count"] == 4 * k * (k + 1) + 2
                      and validate_scss(art.instance, wit)
                      and planarity_check(art.instance.graph))
                return CaseRecord("", ok, budget=art.budget, achieved=wit.weight)

            _case(report, f"k{k}-n{n}-s{seed}", body)
    return report


def _trivial_pre_gt(k: int, n: int) -> GridTilingInstance:
    cell = frozenset({(1, 1)} if n == 1 else {(n, n)})
    return GridTilingInstance(k, n, tuple(tuple(cell for _ in range(k))
                                          for _ in range(k)))


def run_dsn_roundtrip(k: int = 2, n_values=(2, 3), yes_seeds=range(10),
                      no_seeds=range(10), timeout: float = 600.0) -> ExperimentReport:
    report = ExperimentReport("dsn-roundtrip",
                              {"k": k, "n_values": tuple(n_values),
                               "yes_seeds": tuple(yes_seeds),
                               "no_seeds": tuple(no_seeds), "timeout": timeout})
    for n in n_values:
        for seed in yes_seeds:
            def body(n=n, seed=seed):
                if n - 1 >= 2:
                    pre = plant_gridtiling(seed, k, n - 1, noise=1, answer="yes")
                else:
                    pre = _trivial_pre_gt(k, 1)
                gt = normalize_gridtiling(pre, 1)
                art = reduce_gt_to_dsn(gt)
                thr = art.budget - k * k
                wit = dsn_witness(art, gt, solve_gridtiling(gt))
                structural = (wit.weight == thr
                              and validate_dsn(art.instance, wit)
                              and is_acyclic(art.instance.graph)
                              and planarity_check(art.instance.graph))
                res = exact_dsn(art.instance, seed_solution=wit.arcs,
                                timeout=timeout)
                if res.status == TIMEOUT:
                    return CaseRecord("", None, budget=thr, note="timeout")
                ok = structural and res.status == OPTIMAL and res.weight == thr
                return CaseRecord("", ok, budget=thr, achieved=res.weight,
                                  nodes=res.nodes_explored)

            _case(report, f"yes-k{k}-n{n}-s{seed}", body)
        for seed in no_seeds:
            # Normalized instances at n=2 are single-entry and always
            # solvable; unsolvable ones first exist at n=3.
            if n - 1 < 2:
                continue

            def body(n=n, seed=seed):
                pre = plant_gridtiling(seed, k, n - 1, noise=1, answer="no")
                gt = normalize_gridtiling(pre, 1)
                art = reduce_gt_to_dsn(gt)
                thr = art.budget - k * k
                res = exact_dsn(art.instance, budget_only=thr, timeout=timeout)
                if res.status == TIMEOUT:
                    return CaseRecord("", None, budget=thr, note="timeout")
                ok = (res.status == DECISION_NO
                      and is_acyclic(art.instance.graph)
                      and planarity_check(art.instance.graph))
                return CaseRecord("", ok, budget=thr,
                                  decision=res.status, nodes=res.nodes_explored)

            _case(report, f"no-k{k}-n{n}-s{seed}", body)
    return report


def run_psi_roundtrip(count: int = 20, seed: int = 0,
                      timeout: float = 600.0) -> ExperimentReport:
    report = ExperimentReport("psi-roundtrip",
                              {"count": count, "seed": seed, "timeout": timeout})
    import random as _random

    rng = _random.Random(seed)
    produced = 0
    attempt = 0
    while produced < count:
        attempt += 1
        ell = rng.randint(2, 3)
        inst = random_psi(rng.randrange(2**30), ell, class_size=2,
                          edge_prob=rng.uniform(0.3, 0.9))
        if len(inst.host_vertices) > 6 or len(inst.host_edges) > 7:
            continue
        produced += 1

        def body(inst=inst):
            truth = solve_psi(inst) is not None
            art = reduce_psi_to_scss(inst)
            res = exact_scss(art.instance, budget_only=art.budget,
                             timeout=timeout)
            if res.status == TIMEOUT:
                return CaseRecord("", None, budget=art.budget, note="timeout")
            answer = res.status == DECISION_YES
            return CaseRecord("", answer == truth, budget=art.budget,
                              decision=res.status, nodes=res.nodes_explored,
                              note=f"psi={'yes' if truth else 'no'}")

        _case(report, f"case{produced}", body)
    return report


def run_structure_sweep(count: int = 50, seed: int = 0) -> ExperimentReport:
    report = ExperimentReport("structure-sweep", {"count": count, "seed": seed})
    import random as _random

    rng = _random.Random(seed)
    for idx in range(count):
        def body(idx=idx):
            k = rng.randint(3, 6)
            npts = rng.randint(max(4, k + 1), 9)
            inst = random_planar_scss(rng.randrange(2**30), npts, k)
            opt = exact_scss(inst)
            assert opt.status == OPTIMAL
            m = minimalize(inst, opt.solution)
            rep = verify_structure(m, inst, inst.terminals[0])
            return CaseRecord("", rep.ok, achieved=rep.w_size,
                              budget=rep.w_bound,
                              note=f"tw(M)={rep.solution_treewidth} "
                                   f"issues={rep.issues}")

        _case(report, f"inst{idx}", body)
    return report


def run_vertexize_equiv(count: int = 20, seed: int = 0) -> ExperimentReport:
    report = ExperimentReport("vertexize-equiv", {"count": count, "seed": seed})
    import random as _random

    rng = _random.Random(seed)
    for idx in range(count):
        def body(idx=idx):
            inst = random_scss_instance(rng.randrange(2**30), nv=5,
                                        narcs=rng.randint(6, 10), k=3,
                                        wmax=2, feasible=True)
            opt = exact_scss(inst)
            assert opt.status == OPTIMAL
            ok = True
            notes = []
            for c in (opt.weight - 1, opt.weight):
                edge_yes = c >= opt.weight
                vinst, vbudget = vertexize(inst, c)
                if vbudget < 0:
                    vertex_yes = False
                else:
                    vres = solve_vertex_scss(vinst, budget_only=vbudget)
                    vertex_yes = vres.status == DECISION_YES
                notes.append(f"C={c}: edge={edge_yes} vertex={vertex_yes}")
                ok = ok and (edge_yes == vertex_yes)
            return CaseRecord("", ok, achieved=opt.weight,
                              note="; ".join(notes))

        _case(report, f"inst{idx}", body)
    return report


def run_tw2_recognizer(max_exhaustive: int = 6, sampled: int = 500,
                       closure: int = 200, seed: int = 0) -> ExperimentReport:
    report = ExperimentReport("tw2-recognizer",
                              {"max_exhaustive": max_exhaustive,
                               "sampled": sampled, "closure": closure,
                               "seed": seed})

    def exhaustive():
        import itertools

        checked = 0
        for n in range(1, max_exhaustive + 1):
            pairs = list(itertools.combinations(range(n), 2))
            for mask in range(1 << len(pairs)):
                edges = {frozenset(pairs[i]) for i in range(len(pairs))
                         if mask >> i & 1}
                rec = treewidth_le_2(range(n), edges)
                exact = treewidth_exact_edges(list(range(n)), edges).width <= 2
                if rec != exact:
                    return CaseRecord("", False, note=f"mismatch n={n} {edges}")
                checked += 1
        return CaseRecord("", True, note=f"{checked} labeled graphs")

    _case(report, "exhaustive", exhaustive)

    def sample():
        import random as _random

        rng = _random.Random(seed)
        for i in range(sampled):
            n = rng.randint(7, 10)
            edges = random_undirected_edges(rng.randrange(2**30), n,
                                            rng.uniform(0.1, 0.6))
            rec = treewidth_le_2(range(n), edges)
            exact = treewidth_exact_edges(list(range(n)), edges).width <= 2
            if rec != exact:
                return CaseRecord("", False, note=f"mismatch sample {i}")
        return CaseRecord("", True, note=f"{sampled} samples (7-10 vertices)")

    _case(report, "sampled", sample)

    def subdivision():
        import random as _random

        rng = _random.Random(seed + 1)
        for i in range(closure):
            vertices, edges = random_tw2_graph(rng.randrange(2**30),
                                               rng.randint(1, 12))
            if not treewidth_le_2(vertices, edges):
                return CaseRecord("", False, note=f"generator broke tw<=2 at {i}")
            edge = rng.choice(sorted(tuple(sorted(e)) for e in edges))
            new = max(vertices) + 1
            edges2 = (edges - {frozenset(edge)}) | {frozenset((edge[0], new)),
                                                    frozenset((new, edge[1]))}
            if not treewidth_le_2(vertices + [new], edges2):
                return CaseRecord("", False,
                                  note=f"subdivision closure broke at {i}")
        return CaseRecord("", True, note=f"{closure} subdivision checks")

    _case(report, "subdivision-closure", subdivision)

    def k4():
        edges = {frozenset((a, b)) for a in range(4) for b in range(a + 1, 4)}
        return CaseRecord("", not treewidth_le_2(range(4), edges), note="K4")

    _case(report, "k4", k4)
    return report


EXPERIMENTS = {
    "gadget-connector": run_gadget_connector,
    "gadget-main": run_gadget_main,
    "scss-constructive": run_scss_constructive,
    "dsn-roundtrip": run_dsn_roundtrip,
    "psi-roundtrip": run_psi_roundtrip,
    "structure-sweep": run_structure_sweep,
    "vertexize-equiv": run_vertexize_equiv,
    "tw2-recognizer": run_tw2_recognizer,
}


def run_experiment(name: str, **params) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; "
                         f"choose from {sorted(EXPERIMENTS)}")
    return EXPERIMENTS[name](**params)
