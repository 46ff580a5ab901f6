"""``rbpebble`` command line: generate, reduce, solve, run greedy, validate, sweep R.

Results go to stdout as JSON (or CSV for ``tradeoff``); domain errors exit 1
with a JSON object on stderr, usage errors exit 2 (argparse).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dag import DagError, load_dag, save_dag
from .engine import (
    Finish, GoalNotReached, IllegalMove, IllegalMoveAt, ModelSpec, Start, Trace, Variant,
    fraction_to_dict, parse_fraction, validate_trace, DEFAULT_EPSILON,
)
from .generators import (
    GeneratorError, UndirectedGraph, gen_greedy_grid, gen_tradeoff_dag,
    reduce_hampath, reduce_vertex_cover,
)
from .solvers import (
    GreedyPolicy, Infeasible, SearchLimits, curve_to_csv, greedy_pebble, solve_exact,
    tradeoff_curve,
)


class UsageError(Exception):
    pass


def _epsilon(text: str):
    try:
        return parse_fraction(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=[v.value for v in Variant])
    p.add_argument("--epsilon", type=_epsilon, default=DEFAULT_EPSILON, metavar="P/Q")
    p.add_argument("--start", choices=[s.value for s in Start], default=Start.FREE_SOURCES.value)
    p.add_argument("--finish", choices=[f.value for f in Finish],
                   default=Finish.ANY_PEBBLE_ON_SINKS.value)


def _model(args) -> ModelSpec:
    return ModelSpec(Variant(args.model), args.epsilon, Start(args.start), Finish(args.finish))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rbpebble", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    gen = sub.add_parser("gen", help="generate a gadget DAG")
    gsub = gen.add_subparsers(dest="what", required=True)
    g = gsub.add_parser("tradeoff")
    g.add_argument("--d", type=_positive, required=True)
    g.add_argument("--m", type=_positive, required=True)
    g.add_argument("--out", required=True)
    g = gsub.add_parser("grid")
    g.add_argument("--l", type=_positive, required=True)
    g.add_argument("--k", type=_positive, required=True)
    g.add_argument("--kprime", type=_positive, required=True)
    g.add_argument("--out", required=True)

    red = sub.add_parser("reduce", help="build a reduction instance from a graph")
    rsub = red.add_subparsers(dest="what", required=True)
    r = rsub.add_parser("hampath")
    r.add_argument("--graph", required=True)
    r.add_argument("--model", required=True, choices=[v.value for v in Variant])
    r.add_argument("--epsilon", type=_epsilon, default=DEFAULT_EPSILON, metavar="P/Q")
    r.add_argument("--out", required=True)
    r = rsub.add_parser("vertexcover")
    r.add_argument("--graph", required=True)
    r.add_argument("--k", type=_positive, required=True)
    r.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="exact minimum-cost pebbling")
    p.add_argument("--dag", required=True)
    _add_model(p)
    p.add_argument("--red", type=_positive, required=True)
    p.add_argument("--max-states", type=_positive, default=0)
    p.add_argument("--trace-out")

    p = sub.add_parser("greedy", help="greedy pebbling")
    p.add_argument("--dag", required=True)
    _add_model(p)
    p.add_argument("--red", type=_positive, required=True)
    p.add_argument("--rule", required=True, choices=["most-red", "fewest-blue", "best-ratio"])
    p.add_argument("--eviction", required=True, choices=["farthest", "lowest-id"])
    p.add_argument("--trace-out")

    p = sub.add_parser("validate", help="replay a trace and report its cost")
    p.add_argument("--dag", required=True)
    _add_model(p)
    p.add_argument("--red", type=_positive, required=True)
    p.add_argument("--trace", required=True)

    p = sub.add_parser("tradeoff", help="optimal cost for every R in a range")
    p.add_argument("--dag", required=True)
    _add_model(p)
    p.add_argument("--r-min", type=_positive, required=True)
    p.add_argument("--r-max", type=_positive, required=True)
    p.add_argument("--max-states", type=_positive, default=0)
    p.add_argument("--csv", required=True)
    return ap


def sidecar_path(out: str) -> Path:
    p = Path(out)
    return p.with_name(p.stem + ".instance.json")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _write_trace(path, trace: Trace) -> None:
    if path:
        Path(path).write_text(trace.to_jsonl())


def _cmd_gen(args) -> dict:
    if args.what == "tradeoff":
        dag = gen_tradeoff_dag(args.d, args.m)
    else:
        dag = gen_greedy_grid(args.l, args.k, args.kprime)
    save_dag(dag, args.out)
    return {"out": args.out, "name": dag.name, "n": dag.n, "edges": len(dag.edges),
            "feasibility_threshold": int(dag.meta["feasibility_threshold"])}


def _cmd_reduce(args) -> dict:
    graph = UndirectedGraph.from_json(Path(args.graph).read_text())
    if args.what == "hampath":
        inst = reduce_hampath(graph, ModelSpec(Variant(args.model), args.epsilon))
    else:
        inst = reduce_vertex_cover(graph, args.k)
    side = sidecar_path(args.out)
    inst.save(args.out, side)
    return {"out": args.out, "instance": str(side), "kind": inst.kind.value, "R": inst.R,
            "n": inst.dag.n,
            "threshold": None if inst.threshold is None else fraction_to_dict(inst.threshold)}


def _cmd_solve(args) -> dict:
    dag = load_dag(args.dag)
    res = solve_exact(dag, _model(args), args.red, SearchLimits(max_states=args.max_states))
    _write_trace(args.trace_out, res.trace)
    return {"cost": fraction_to_dict(res.cost), "exhausted": res.exhausted,
            "states_expanded": res.states_expanded, "moves": len(res.trace)}


def _cmd_greedy(args) -> dict:
    dag = load_dag(args.dag)
    model = _model(args)
    trace = greedy_pebble(dag, model, args.red, GreedyPolicy(args.rule, args.eviction))
    _write_trace(args.trace_out, trace)
    report = validate_trace(dag, model, args.red, trace)
    return {"cost": fraction_to_dict(report.total), "moves": len(trace), "rule": args.rule,
            "eviction": args.eviction}


def _cmd_validate(args) -> dict:
    dag = load_dag(args.dag)
    trace = Trace.from_jsonl(Path(args.trace).read_text())
    return validate_trace(dag, _model(args), args.red, trace).to_dict()


def _cmd_tradeoff(args) -> str:
    dag = load_dag(args.dag)
    curve = tradeoff_curve(dag, _model(args), args.r_min, args.r_max,
                           SearchLimits(max_states=args.max_states))
    text = curve_to_csv(curve)
    Path(args.csv).write_text(text)
    return text


COMMANDS = {"gen": _cmd_gen, "reduce": _cmd_reduce, "solve": _cmd_solve,
            "greedy": _cmd_greedy, "validate": _cmd_validate, "tradeoff": _cmd_tradeoff}

DOMAIN_ERRORS = (DagError, GeneratorError, Infeasible, IllegalMove, GoalNotReached,
                 ValueError, OSError)


def _error_payload(e: Exception) -> dict:
    out = {"error": type(e).__name__, "message": str(e)}
    if isinstance(e, IllegalMove):
        out["error"] = e.reason
        out["move"] = None if e.move is None else json.loads(e.move.to_json())
    if isinstance(e, IllegalMoveAt):
        out["index"] = e.index
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.verb](args)
    except DOMAIN_ERRORS as e:
        print(_dump(_error_payload(e)), file=sys.stderr)
        return 1
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        print(_dump(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
