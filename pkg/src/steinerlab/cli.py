"""Command-line front end.

Verbs: gen (problem instances), reduce (hardness reductions), solve
(exact/approximate solvers), analyze (structure / treewidth), verify
(solution checking), experiment (named verification drivers).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .bnb import exact_dsn, exact_scss
from .dst import dreyfus_wagner_dst, scss_two_approx
from .formats import (
    parse_gridtiling,
    parse_instance,
    parse_psi,
    parse_solution,
    serialize_gridtiling,
    serialize_instance,
    serialize_psi,
    serialize_solution,
)
from .graph import DsnInstance, ScssInstance, validate_dsn, validate_scss
from .problems import normalize_gridtiling, plant_gridtiling, random_psi
from .reductions import compose_scss, reduce_gt_to_dsn, reduce_psi_to_scss
from .structure import minimalize, verify_structure
from .treewidth import treewidth_exact_small, treewidth_upper
from .twdp import scss_treewidth_dp


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_gen(args) -> int:
    if args.kind == "gt":
        inst = plant_gridtiling(args.seed, args.k, args.n, args.noise, args.answer)
        if args.normalize:
            inst = normalize_gridtiling(inst, args.normalize)
        _write(args.out, serialize_gridtiling(inst))
    else:
        inst = random_psi(args.seed, args.l, args.class_size, args.edge_prob)
        _write(args.out, serialize_psi(inst))
    return 0


def _cmd_reduce(args) -> int:
    text = Path(args.input).read_text()
    if args.kind == "scss-planar":
        gt = normalize_gridtiling(parse_gridtiling(text), 2) \
            if args.normalize else parse_gridtiling(text)
        art = compose_scss(gt)
    elif args.kind == "dsn-planar":
        gt = normalize_gridtiling(parse_gridtiling(text), 1) \
            if args.normalize else parse_gridtiling(text)
        art = reduce_gt_to_dsn(gt)
    else:
        art = reduce_psi_to_scss(parse_psi(text))
    out = args.out or (args.input + ".instance")
    _write(out, serialize_instance(art.instance))
    sidecar = {
        "budget": art.budget,
        "meta": art.meta,
        "provenance": {str(v): list(map(list, p))
                       for v, p in sorted(art.vertex_provenance.items())},
    }
    _write(out + ".meta.json", json.dumps(sidecar, indent=1))
    print(f"wrote {out} (budget {art.budget})")
    return 0


def _cmd_solve(args) -> int:
    inst = parse_instance(Path(args.input).read_text())
    if args.problem == "scss" and not isinstance(inst, ScssInstance):
        raise SystemExit("instance file holds a DSN instance")
    if args.problem == "dsn" and not isinstance(inst, DsnInstance):
        raise SystemExit("instance file holds an SCSS instance")
    if args.method == "bnb":
        solve = exact_scss if isinstance(inst, ScssInstance) else exact_dsn
        res = solve(inst, budget_only=args.budget, timeout=args.timeout)
    elif args.method == "twdp":
        if not isinstance(inst, ScssInstance):
            raise SystemExit("twdp solves SCSS instances only")
        if inst.graph.n <= 18:
            td = treewidth_exact_small(inst.graph)
        else:
            _w, td = treewidth_upper(inst.graph)
        res = scss_treewidth_dp(inst, td)
    else:  # dst2x
        if not isinstance(inst, ScssInstance):
            raise SystemExit("dst2x approximates SCSS instances only")
        res = scss_two_approx(inst)
    print(f"status\t{res.status}")
    print(f"weight\t{res.weight}")
    print(f"nodes\t{res.nodes_explored}")
    if res.root_lower_bound is not None:
        print(f"root_lb\t{res.root_lower_bound}")
    if res.solution is not None:
        print(serialize_solution(res.solution.arcs), end="")
    return 0


def _cmd_analyze(args) -> int:
    inst = parse_instance(Path(args.input).read_text())
    if args.what == "tw":
        if inst.graph.n <= 18:
            td = treewidth_exact_small(inst.graph)
            print(f"treewidth\t{td.width}\texact")
        else:
            w, td = treewidth_upper(inst.graph)
            print(f"treewidth\t{w}\tupper-bound")
        for i, bag in enumerate(td.bags):
            print(f"bag {i}\t{' '.join(map(str, sorted(bag)))}")
        for (a, b) in td.tree_edges:
            print(f"tree {a} {b}")
        return 0
    if not isinstance(inst, ScssInstance):
        raise SystemExit("structure analysis needs an SCSS instance")
    sol = parse_solution(Path(args.solution).read_text(), inst.graph)
    m = minimalize(inst, sol)
    root = args.root if args.root is not None else inst.terminals[0]
    rep = verify_structure(m, inst, root)
    print(f"k\t{rep.k}")
    print(f"|W|\t{rep.w_size}\t(bound {rep.w_bound})")
    print(f"components\t{rep.component_count}")
    print(f"components_tw_le_2\t{rep.components_tw_le_2}")
    print(f"essential_paths_ok\t{rep.essential_paths_per_component_ok}")
    print(f"shared_order_ok\t{rep.shared_order_reversed_ok}")
    print(f"tw(M)\t{rep.solution_treewidth}"
          f"\t({'exact' if rep.treewidth_is_exact else 'upper'})")
    print(f"verdict\t{'PASS' if rep.ok else 'FAIL'}")
    for issue in rep.issues:
        print(f"issue\t{issue}")
    return 0 if rep.ok else 1


def _cmd_verify(args) -> int:
    inst = parse_instance(Path(args.input).read_text())
    sol = parse_solution(Path(args.solution).read_text(), inst.graph)
    ok = validate_scss(inst, sol) if isinstance(inst, ScssInstance) \
        else validate_dsn(inst, sol)
    print(f"valid\t{ok}")
    print(f"weight\t{sol.weight}")
    if args.budget is not None:
        print(f"within_budget\t{ok and sol.weight <= args.budget}")
    return 0 if ok else 1


def _cmd_experiment(args) -> int:
    params = json.loads(args.params) if args.params else {}
    if args.timeout is not None:
        params.setdefault("timeout", args.timeout)
    if args.seed is not None:
        params.setdefault("seed", args.seed)
    report = experiments.run_experiment(args.name, **params)
    text = report.table() + "\n"
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / f"{args.name}.txt").write_text(text)
    sys.stdout.write(text)
    return 0 if report.verdict == experiments.PASS else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steinerlab",
                                description="Directed Steiner hardness lab")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate problem instances")
    g.add_argument("kind", choices=["gt", "psi"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--noise", type=int, default=1)
    g.add_argument("--answer", choices=["yes", "no"], default="yes")
    g.add_argument("--normalize", type=int, choices=[1, 2], default=None)
    g.add_argument("--l", type=int, default=2, help="PSI pattern size")
    g.add_argument("--class-size", type=int, default=2)
    g.add_argument("--edge-prob", type=float, default=0.5)
    g.add_argument("--out", default="-")
    g.set_defaults(fn=_cmd_gen)

    r = sub.add_parser("reduce", help="run a hardness reduction")
    r.add_argument("kind", choices=["scss-planar", "dsn-planar", "psi-scss"])
    r.add_argument("input")
    r.add_argument("--normalize", action="store_true",
                   help="normalize the Grid Tiling input first")
    r.add_argument("--out")
    r.set_defaults(fn=_cmd_reduce)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("problem", choices=["scss", "dsn"])
    s.add_argument("input")
    s.add_argument("--method", choices=["bnb", "twdp", "dst2x"], default="bnb")
    s.add_argument("--budget", type=int, default=None)
    s.add_argument("--timeout", type=float, default=None)
    s.set_defaults(fn=_cmd_solve)

    a = sub.add_parser("analyze", help="structure / treewidth analysis")
    a.add_argument("what", choices=["structure", "tw"])
    a.add_argument("input")
    a.add_argument("solution", nargs="?")
    a.add_argument("--root", type=int, default=None)
    a.set_defaults(fn=_cmd_analyze)

    v = sub.add_parser("verify", help="validate a solution file")
    v.add_argument("input")
    v.add_argument("solution")
    v.add_argument("--budget", type=int, default=None)
    v.set_defaults(fn=_cmd_verify)

    e = sub.add_parser("experiment", help="run a named experiment")
    e.add_argument("name", choices=sorted(experiments.EXPERIMENTS))
    e.add_argument("--params", help="JSON dict of experiment parameters")
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--timeout", type=float, default=None)
    e.add_argument("--out", help="directory for the flat results table")
    e.set_defaults(fn=_cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
