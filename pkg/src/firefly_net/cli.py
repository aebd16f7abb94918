"""Command-line entry point.

Exit status: 0 on pass / normal completion, 2 when a checked claim fails on
the instance, 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from . import analysis as an
from .dynamics import Configuration, DynamicsError, compute_orbit, all_blink_infinitely, blinks_infinitely
from .export import dumps, export_trace
from .graph import (
    Graph,
    GraphError,
    build_family,
    format_edge_list,
    graph_to_json,
    load_graph,
    structural_queries,
    to_dot,
    trees_up_to,
    find_stars_and_branches,
)
from .statespace import DEFAULT_BUDGET, BudgetExceeded
from .stochastic import EDGE_RECEPTION, VERTEX_EMISSION, NoiseModel, StochasticError, build_and_analyze_chain, mc_ensemble

log = logging.getLogger("firefly_net")

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


def parse_family(spec: str) -> Graph:
    """``path:5``, ``cycle:4``, ``star:3``, ``complete:3`` or ``tree:0-1,1-2``."""
    name, _, arg = spec.partition(":")
    if not arg:
        raise UsageError(f"family spec {spec!r} needs a parameter, e.g. path:4")
    if name == "tree":
        edges = [tuple(int(x) for x in pair.split("-")) for pair in arg.split(",") if pair]
        return build_family("tree_from_edges", edges)
    try:
        return build_family(name, int(arg))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def graph_from_args(args) -> Graph:
    sources = [s for s in (args.family, args.edges, args.graph_json) if s]
    if len(sources) != 1:
        raise UsageError("give exactly one of --family, --edges, --graph-json")
    if args.family:
        return parse_family(args.family)
    return load_graph(args.edges or args.graph_json)


def config_from_args(args, g: Graph) -> Configuration:
    if not args.config:
        raise UsageError("--config is required")
    x = Configuration.parse(args.config, args.n)
    if len(x) != g.vertex_count:
        raise UsageError(f"configuration has {len(x)} states, graph has {g.vertex_count} vertices")
    return x


def emit(args, payload) -> None:
    text = dumps(payload)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def orbit_summary(orbit) -> dict:
    return {
        "transient": orbit.transient_length,
        "period": orbit.cycle_length,
        "sync_time": orbit.sync_time,
        "synchronizes": orbit.sync_time is not None,
        "blinks_in_cycle": [blinks_infinitely(orbit, v) for v in range(len(orbit.initial))],
    }


# --- commands ------------------------------------------------------------------

def cmd_simulate(args) -> int:
    g = graph_from_args(args)
    x0 = config_from_args(args, g)
    orbit = compute_orbit(g, x0, cap=args.cap)
    if args.trace:
        export_trace(g, orbit, "json", args.trace)
    if args.csv:
        export_trace(g, orbit, "csv", args.csv)
    if args.dot_dir:
        export_trace(g, orbit, "dot_frames", args.dot_dir)
    if orbit.truncated:
        payload = {"initial": list(x0.states), "truncated": True, "cap": args.cap}
    else:
        payload = {"initial": list(x0.states), "n": x0.n, **orbit_summary(orbit)}
    emit(args, payload)
    return EXIT_OK


def cmd_check_sync(args) -> int:
    g = graph_from_args(args)
    rep = an.is_n_synchronizing(g, args.n, args.budget)
    emit(args, rep.to_json())
    if args.expect == "sync" and not rep.is_n_synchronizing:
        return EXIT_FAIL
    if args.expect == "nonsync" and rep.is_n_synchronizing:
        return EXIT_FAIL
    return EXIT_OK


def cmd_path_bounds(args) -> int:
    rows = []
    ok = True
    for m in range(args.m_min, args.m_max + 1):
        pb = an.max_sync_time_path(args.n, m, args.budget)
        slow = an.slow_path_report(args.n, m)
        ok &= pb.within_upper and pb.pull_violations == 0
        rows.append({
            "n": args.n,
            "m": m,
            "T": pb.T,
            "argmax": list(pb.argmax.states),
            "lower_bound": float(pb.lower_bound),
            "upper_bound": float(pb.upper_bound),
            "within_upper": pb.within_upper,
            "meets_lower": pb.meets_lower,
            "slow_config_sync_time": slow.sync_time,
        })
    if args.csv:
        _write_csv(args.csv, rows)
    emit(args, {"rows": rows, "passed": ok})
    return EXIT_OK if ok else EXIT_FAIL


def _write_csv(path, rows: list[dict]) -> None:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    Path(path).write_text(buf.getvalue())


def cmd_verify_tree(args) -> int:
    rep = an.verify_tree_theorem(args.n, args.max_vertices, args.budget, jobs=args.jobs)
    rows = [{
        "tree_id": i,
        "vertices": r.tree.vertex_count,
        "edges": " ".join(f"{u}-{v}" for u, v in r.tree.sorted_edges()),
        "n": r.n,
        "maxdeg": r.max_degree,
        "synchronizing": r.synchronizing,
        "verdict": "pass" if r.agrees else "fail",
        "max_sync_time": r.max_sync_time,
    } for i, r in enumerate(rep.rows)]
    if args.csv:
        _write_csv(args.csv, rows)
    emit(args, {"n": args.n, "max_vertices": args.max_vertices, "trees": len(rows),
                "exceptions": len(rep.exceptions), "passed": rep.passed})
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify_blinking(args) -> int:
    if args.family or args.edges or args.graph_json:
        trees = [graph_from_args(args)]
    else:
        trees = trees_up_to(args.max_vertices, 2)
    out, ok = [], True
    for t in trees:
        rep = an.verify_blinking_theorem(args.n, t, args.budget)
        ok &= rep.passed
        out.append({
            "edges": [list(e) for e in t.sorted_edges()],
            "configs_checked": rep.configs_checked,
            "violations": rep.violations,
            "witness": None if rep.witness is None else list(rep.witness.states),
        })
    emit(args, {"n": args.n, "trees": out, "passed": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_degree(args) -> int:
    g = graph_from_args(args)
    rep = an.verify_degree_lemma(g, args.n, args.vertex, args.budget, samples=args.samples, seed=args.seed)
    emit(args, {"vertex": rep.vertex, "n": rep.n, "configs_checked": rep.configs_checked,
                "failures": rep.failures, "passed": rep.passed,
                "witness": None if rep.witness is None else list(rep.witness.states)})
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_classify(args) -> int:
    g = graph_from_args(args)
    x0 = config_from_args(args, g)
    rm = an.return_map(g, x0, args.vertex)
    emit(args, {
        "center": rm.center,
        "leaves": list(rm.leaves),
        "never_blinks": rm.never_blinks,
        "snapshots": [{
            "time": s.time,
            "neighborhood": list(s.neighborhood),
            "standard_states": list(s.standard_states),
            "relative_states": list(s.relative_states),
            "activator": s.activator_state,
            "in_cycle": s.in_cycle,
            "class": rm.classification[s.key],
            "is_opposite": s.is_opposite,
            "duplicate_leaf_states": s.has_duplicate_leaf_states,
            "single_leaf_state": s.single_leaf_state,
            "small_width": s.small_width,
        } for s in rm.snapshots],
    })
    return EXIT_OK


def cmd_irreducible(args) -> int:
    g = graph_from_args(args)
    x0 = config_from_args(args, g)
    res = an.is_irreducible(g, x0)
    emit(args, {"irreducible": res.irreducible,
                "reducing_subgraph": None if res.reducing_subgraph is None else list(res.reducing_subgraph),
                "r": res.r, "subgraphs_checked": res.subgraphs_checked})
    return EXIT_OK


def cmd_quotient(args) -> int:
    g = graph_from_args(args)
    x0 = config_from_args(args, g)
    q = an.two_state_quotient(g, x0)
    tracks, first_bad = an.quotient_tracks(g, x0)
    orbit = compute_orbit(g, x0)
    emit(args, {
        "path_vertices": q.path.vertex_count,
        "path_config": list(q.path_config.states),
        "classes": [list(c) for c in q.classes],
        "tracks": tracks,
        "first_mismatch": first_bad,
        "sync_time": orbit.sync_time,
    })
    return EXIT_OK if tracks and orbit.sync_time is not None else EXIT_FAIL


def cmd_branch_width(args) -> int:
    g = graph_from_args(args)
    x0 = config_from_args(args, g)
    branches = [s for s in find_stars_and_branches(g) if s.is_branch and s.center == args.center]
    if not branches:
        raise UsageError(f"vertex {args.center} is not the center of a branch")
    rep = an.verify_branch_width(g, branches[0], x0)
    emit(args, {
        "initial_width": rep.initial_width,
        "r": rep.r,
        "claim_i": rep.claim_i,
        "claim_ii": rep.claim_ii,
        "claim_iii": rep.claim_iii,
        "failures": rep.failures,
        "restriction_time": rep.restriction_time,
        "pruning_bound": None if rep.pruning_bound is None else float(rep.pruning_bound),
        "passed": rep.passed,
    })
    return EXIT_OK if rep.passed else EXIT_FAIL


def _counterexample_payload(kind: str, g: Graph, x0: Configuration) -> tuple[dict, bool]:
    orbit = compute_orbit(g, x0)
    summary = orbit_summary(orbit)
    if kind == "n7-star-search":
        ok = summary["sync_time"] is None and all_blink_infinitely(orbit)
    elif kind == "high-degree-tree":
        center = max(range(g.vertex_count), key=g.degree)
        ok = summary["sync_time"] is None and not blinks_infinitely(orbit, center)
    else:
        ok = summary["sync_time"] is None
    payload = {"kind": kind, "graph": graph_to_json(g), "n": x0.n, "config": list(x0.states), **summary,
               "as_expected": ok}
    return payload, ok


def cmd_counterexample(args) -> int:
    kind = args.kind
    if kind == "high-degree-tree":
        tree = graph_from_args(args) if (args.family or args.edges or args.graph_json) else None
        g, x0 = an.gen_counterexample("high_degree_tree", n=args.n, tree=tree)
    elif kind == "k3-three-states":
        g, x0 = an.gen_counterexample("k3_three_states", q=args.q)
    else:
        g, x0 = an.gen_counterexample("n7_star_search", n=args.n)
    payload, ok = _counterexample_payload(kind, g, x0)
    emit(args, payload)
    return EXIT_OK if ok else EXIT_FAIL


def _noise(args, g: Graph) -> NoiseModel:
    return NoiseModel.uniform(g, args.p, args.mode)


def cmd_mc(args) -> int:
    g = graph_from_args(args)
    x0 = config_from_args(args, g)
    rep = mc_ensemble(g, x0, _noise(args, g), args.runs, args.seed, args.cap, jobs=args.jobs)
    emit(args, rep.to_json())
    return EXIT_OK


def cmd_chain(args) -> int:
    g = graph_from_args(args)
    rep = build_and_analyze_chain(g, args.n, _noise(args, g))
    emit(args, rep.to_json())
    ok = rep.sync_unique_absorbing and rep.reaches_sync_from_all
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gen(args) -> int:
    if args.trees:
        graphs = trees_up_to(args.trees, args.trees)
    else:
        graphs = [graph_from_args(args)]
    chunks = []
    for g in graphs:
        if args.format == "edges":
            chunks.append(format_edge_list(g))
        elif args.format == "dot":
            chunks.append(to_dot(g))
        else:
            chunks.append(dumps({**graph_to_json(g), **structural_queries(g)}))
    text = "\n".join(chunks)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_named_scenario(args) -> int:
    name = args.scenario
    if name == "fig8-path":
        rep = an.slow_path_report(args.n, args.m)
        payload = {"scenario": name, "n": rep.n, "m": rep.m, "config": list(an.slow_path_configuration(rep.n, rep.m).states),
                   "sync_time": rep.sync_time, "formula": float(rep.formula),
                   "matches_formula": rep.matches_formula}
        emit(args, payload)
        # the construction must synchronize; agreement with the formula is reported only
        return EXIT_OK if rep.sync_time is not None else EXIT_FAIL
    kind = {"k3-three-states": "k3-three-states", "n7-star": "n7-star-search",
            "high-degree-tree": "high-degree-tree"}[name]
    if kind == "k3-three-states":
        g, x0 = an.k3_three_states(args.q)
    elif kind == "n7-star-search":
        g, x0 = an.n7_star_search()
    else:
        g, x0 = an.high_degree_counterexample(build_family("star", args.n), args.n)
    payload, ok = _counterexample_payload(kind, g, x0)
    payload["scenario"] = name
    emit(args, payload)
    return EXIT_OK if ok else EXIT_FAIL


# --- parser ------------------------------------------------------------------

def _graph_opts(p) -> None:
    p.add_argument("--family", help="path:M, cycle:M, star:K, complete:M or tree:0-1,1-2,...")
    p.add_argument("--edges", help="edge-list file")
    p.add_argument("--graph-json", help="JSON graph file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firefly-net", description="Finite-state pulse-coupled oscillator networks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, graph=True, n=True, config=False, out=True):
        p = sub.add_parser(name)
        if graph:
            _graph_opts(p)
        if n:
            p.add_argument("--n", type=int, required=True, help="period")
        if config:
            p.add_argument("--config", help="comma-separated states, e.g. 2,5,5")
        if out:
            p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max configurations to enumerate")
        p.add_argument("--jobs", type=int, default=1)
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, config=True)
    p.add_argument("--cap", type=int)
    p.add_argument("--trace")
    p.add_argument("--csv")
    p.add_argument("--dot-dir")

    p = add("check-sync", cmd_check_sync)
    p.add_argument("--expect", choices=["sync", "nonsync"])

    p = add("path-bounds", cmd_path_bounds, graph=False)
    p.add_argument("--m-min", type=int, default=2)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--csv")

    p = add("verify-tree", cmd_verify_tree, graph=False)
    p.add_argument("--max-vertices", type=int, required=True)
    p.add_argument("--csv")

    p = add("verify-blinking", cmd_verify_blinking)
    p.add_argument("--max-vertices", type=int, default=6)

    p = add("verify-degree", cmd_verify_degree)
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = add("classify", cmd_classify, config=True)
    p.add_argument("--vertex", type=int, required=True)

    add("irreducible", cmd_irreducible, config=True)
    add("quotient", cmd_quotient, config=True)

    p = add("branch-width", cmd_branch_width, config=True)
    p.add_argument("--center", type=int, required=True)

    p = add("counterexample", cmd_counterexample, n=False)
    p.add_argument("--kind", choices=["high-degree-tree", "k3-three-states", "n7-star-search"], required=True)
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--q", type=int, default=2)

    for name, func in (("mc", cmd_mc), ("chain", cmd_chain)):
        p = add(name, func, config=(name == "mc"))
        p.add_argument("--p", type=float, default=0.5, help="presence probability")
        p.add_argument("--mode", choices=[EDGE_RECEPTION, VERTEX_EMISSION], default=EDGE_RECEPTION)
        if name == "mc":
            p.add_argument("--runs", type=int, default=1000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--cap", type=int, default=100_000)

    p = add("gen", cmd_gen, n=False, out=False)
    p.add_argument("--trees", type=int, help="all non-isomorphic trees on this many vertices")
    p.add_argument("--format", choices=["edges", "json", "dot"], default="json")
    p.add_argument("--out")

    p = add("paper-examples", cmd_named_scenario, graph=False, n=False)
    p.add_argument("scenario", choices=["fig8-path", "k3-three-states", "n7-star", "high-degree-tree"])
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--q", type=int, default=2)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.info("running %s", args.command)
    try:
        return args.func(args)
    except (UsageError, GraphError, DynamicsError, BudgetExceeded, StochasticError,
            an.AnalysisError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
