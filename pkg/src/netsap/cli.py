"""Command-line entry point.

Exit codes: 0 success, 1 check failed, 2 usage or input error, 3 some
required pair stays confusable even with every sensor on, 4 state cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .channels import DelayBounds
from .comm import DEFAULT_STATE_CAP, build_comm, build_w, psi
from .decentralized import joint_conf_check, make_agents, minimize_decentralized
from .diagnosability import FaultSpec, check_delay_k_diag, diag_spec, refine_k_diag
from .dot import state_label, to_dot
from .errors import NetsapError, SpecUnsatisfiableEvenFullyActivated, StateExplosion
from .observability import delayed_conf_pairs, info_map, pair_names
from .synthesis import Cond1, Context, check_delay_feasible, max_feasible_subpolicy, minimize_sap
from .validation import simulate_run

OK, FAILED, USAGE, UNSAT, CAP = 0, 1, 2, 3, 4
DEFAULT_SEED = 0

log = logging.getLogger("netsap")


class UsageError(Exception):
    pass


def _bounds(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--no", type=int, required=required, help="observation delay bound")
    p.add_argument("--nc", type=int, required=required, help="control delay bound")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--max-states", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("--enabled-only", action="store_true",
                   help="confusable states need only agree on events enabled at both")


def _faults(p: argparse.ArgumentParser):
    p.add_argument("--fault", action="append", required=True, metavar="NAME=E1,E2",
                   help="fault class; repeat for several classes")
    p.add_argument("--k", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="netsap", description="Sensor activation under network delays")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("build-comm", help="build the communication automaton")
    p.add_argument("model", type=Path)
    _bounds(p)
    p.add_argument("--w", action="store_true", help="also track the command in force")
    p.add_argument("--dot", type=Path)
    p.add_argument("--max-states", type=int, default=DEFAULT_STATE_CAP)

    p = sub.add_parser("check-feasibility", help="check delay feasibility of a policy")
    p.add_argument("model", type=Path)
    p.add_argument("policy", type=Path)
    _bounds(p)
    _common(p)

    p = sub.add_parser("max-subpolicy", help="largest delay-feasible subpolicy")
    p.add_argument("model", type=Path)
    p.add_argument("policy", type=Path)
    _bounds(p)
    _common(p)
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("synthesize", help="minimal delay-feasible policy separating required state pairs")
    p.add_argument("model", type=Path)
    p.add_argument("spec", type=Path)
    _bounds(p)
    _common(p)
    p.add_argument("--order", default="desc", help="desc, asc, or a policy file giving a preference list")
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--trace", type=Path, help="write the per-candidate log as JSON")

    diag = sub.add_parser("diag", help="delay K-diagnosability").add_subparsers(dest="diag_cmd", required=True)
    p = diag.add_parser("refine", help="refine states with fault counters")
    p.add_argument("model", type=Path)
    _faults(p)
    p.add_argument("-o", "--output", type=Path)
    p = diag.add_parser("spec", help="pairs that must be distinguished")
    p.add_argument("model", type=Path)
    _faults(p)
    p.add_argument("-o", "--output", type=Path)
    p = diag.add_parser("check", help="check delay K-diagnosability under a policy")
    p.add_argument("model", type=Path)
    _faults(p)
    _bounds(p)
    _common(p)
    p.add_argument("--policy", type=Path, required=True)
    p.add_argument("--policy-over", choices=("base", "refined"), default="base")

    p = sub.add_parser("synthesize-dec", help="minimal policy vector for several agents")
    p.add_argument("model", type=Path)
    p.add_argument("agents", type=Path)
    p.add_argument("spec", type=Path)
    p.add_argument("--order", default="desc")
    p.add_argument("--seed", type=int, default=None, help="shuffle the agent order with this seed")
    p.add_argument("--engine", choices=("product", "brute"), default="product")
    p.add_argument("--horizon", type=int, default=8)
    p.add_argument("--enabled-only", action="store_true")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("simulate", help="random walks over the communication automaton")
    p.add_argument("model", type=Path)
    p.add_argument("policy", type=Path)
    _bounds(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-len", type=int, default=30)
    p.add_argument("--log", type=Path, help="per-step trace of every run")

    p = sub.add_parser("export-dot", help="DOT export of the plant, G~ or W")
    p.add_argument("model", type=Path)
    p.add_argument("--what", choices=("plant", "comm", "w"), default="plant")
    _bounds(p, required=False)
    p.add_argument("-o", "--output", type=Path, required=True)
    return ap


def parse_args(argv=None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    for name in ("no", "nc"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            raise UsageError(f"--{name} must be non-negative")
    if getattr(args, "cmd", None) == "export-dot" and args.what != "plant" and (args.no is None or args.nc is None):
        raise UsageError("--no and --nc are required for comm and w exports")
    return args


def _emit(obj, dst: Path | None):
    if dst is None:
        print(json.dumps(obj, indent=2, ensure_ascii=False))
    else:
        io.dump_json(obj, dst)


def _fault_spec(model, args) -> FaultSpec:
    classes = []
    for item in args.fault:
        _, _, events = item.partition("=")
        if not events:
            raise UsageError(f"--fault expects NAME=E1,E2, got {item!r}")
        classes.append([e.strip() for e in events.split(",") if e.strip()])
    unknown = [e for c in classes for e in c if e not in model.event_id]
    if unknown:
        raise UsageError(f"unknown fault events {unknown}")
    return FaultSpec.from_names(model, classes, args.k)


def _order(model, text: str):
    if text in ("desc", "asc"):
        return text
    path = Path(text)
    if not path.exists():
        raise UsageError(f"--order must be desc, asc or a policy file; got {text!r}")
    data = io.read_json(path)
    rows = data["activate"] if isinstance(data, dict) else data
    return [(model.state_id[r["state"]], model.event_id[r["event"]]) for r in rows]


def _describe_violation(model, v) -> str:
    names, evs = model.state_names, model.event_names
    if isinstance(v, Cond1):
        return (f"command: {evs[v.event]} can occur at {names[v.w_state.plant]} while the command from "
                f"{names[v.w_state.cmd]} is in force {state_label(model, v.w_state)}")
    a, b = v.pair
    return f"observation: {names[a]} and {names[b]} are confusable but disagree on {evs[v.event]}"


def cmd_build_comm(args) -> int:
    model = io.model_from_json(args.model)
    bounds = DelayBounds(args.no, args.nc)
    aut = build_comm(model, bounds, args.max_states)
    if args.w:
        aut = build_w(model, bounds, aut, args.max_states)
    print(f"states {len(aut)} transitions {sum(len(d) for d in aut.delta)}")
    if args.dot:
        args.dot.write_text(to_dot(model, aut, "W" if args.w else "G~"))
    return OK


def _ctx(model, args) -> Context:
    bounds = DelayBounds(args.no, args.nc)
    return Context(model, bounds, build_w(model, bounds, max_states=args.max_states), args.enabled_only)


def cmd_check(args) -> int:
    model = io.model_from_json(args.model)
    policy = io.policy_from_json(model, args.policy)
    ctx = _ctx(model, args)
    report = check_delay_feasible(model, ctx.bounds, policy, ctx=ctx)
    if report.feasible:
        print("feasible")
        return OK
    print("infeasible")
    for v in report.violations:
        print("  " + _describe_violation(model, v))
    return FAILED


def cmd_max_sub(args) -> int:
    model = io.model_from_json(args.model)
    policy = io.policy_from_json(model, args.policy)
    ctx = _ctx(model, args)
    sub, pairs = max_feasible_subpolicy(model, ctx.bounds, policy, ctx=ctx)
    out = io.policy_to_json(model, sub)
    out["conf_pairs"] = pair_names(model, pairs)
    out["delayed_conf_pairs"] = pair_names(model, delayed_conf_pairs(model, pairs, ctx.bounds.no))
    _emit(out, args.output)
    return OK


def cmd_synthesize(args) -> int:
    model = io.model_from_json(args.model)
    spec = io.pairs_from_json(model, args.spec)
    ctx = _ctx(model, args)
    policy, trace = minimize_sap(model, ctx.bounds, spec, order=_order(model, args.order), ctx=ctx)
    _emit(io.policy_to_json(model, policy), args.output)
    if args.trace:
        io.dump_json(trace.to_json(model), args.trace)
    return OK


def cmd_diag(args) -> int:
    model = io.model_from_json(args.model)
    faults = _fault_spec(model, args)
    refined = refine_k_diag(model, faults)
    if args.diag_cmd == "refine":
        _emit(io.model_to_json(refined), args.output)
        return OK
    if args.diag_cmd == "spec":
        _emit(io.pairs_to_json(refined, diag_spec(refined, faults)), args.output)
        return OK
    bounds = DelayBounds(args.no, args.nc)
    source = model if args.policy_over == "base" else refined
    policy = io.policy_from_json(source, args.policy)
    ctx = Context(refined, bounds, build_w(refined, bounds, max_states=args.max_states), args.enabled_only)
    result = check_delay_k_diag(model, faults, bounds, policy, over=args.policy_over, refined=refined, ctx=ctx)
    if result.diagnosable:
        print("diagnosable")
        return OK
    print("not diagnosable; confusable pairs:")
    for a, b in pair_names(refined, result.witnesses):
        print(f"  {a} ~ {b}")
    return FAILED


def cmd_synthesize_dec(args) -> int:
    model = io.model_from_json(args.model)
    agents = make_agents(model, io.read_json(args.agents))
    spec = io.tuples_from_json(model, args.spec)
    vec = minimize_decentralized(model, agents, spec, order=_order(model, args.order), seed=args.seed,
                                 engine=args.engine, horizon=args.horizon, enabled_only=args.enabled_only)
    check = joint_conf_check(model, agents, vec, spec, args.horizon, args.engine)
    out = [{"id": a.id, **io.policy_to_json(model, p)} for a, p in zip(agents, vec)]
    _emit({"agents": out, "satisfied": check.disjoint}, args.output)
    return OK if check.disjoint else FAILED


def cmd_simulate(args) -> int:
    model = io.model_from_json(args.model)
    policy = io.policy_from_json(model, args.policy)
    aut = build_comm(model, DelayBounds(args.no, args.nc))
    mismatches = steps = 0
    lines = []
    for run in range(args.runs):
        trace = simulate_run(aut, model, policy, seed=args.seed + run, max_len=args.max_len)
        steps += len(trace.mu)
        if tuple(trace.observation) != info_map(model, policy, psi(trace.mu)):
            mismatches += 1
        if args.log:
            lines.append(f"# run {run} seed {trace.seed}")
            lines.extend(trace.log_lines(model))
    if args.log:
        args.log.write_text("\n".join(lines) + "\n")
    print(f"runs {args.runs} steps {steps} delay-sensitive runs {mismatches}")
    return OK


def cmd_export_dot(args) -> int:
    model = io.model_from_json(args.model)
    if args.what == "plant":
        args.output.write_text(to_dot(model, name="G"))
        return OK
    bounds = DelayBounds(args.no, args.nc)
    aut = build_comm(model, bounds)
    if args.what == "w":
        aut = build_w(model, bounds, aut)
    args.output.write_text(to_dot(model, aut, "W" if args.what == "w" else "G~"))
    return OK


COMMANDS = {
    "build-comm": cmd_build_comm,
    "check-feasibility": cmd_check,
    "max-subpolicy": cmd_max_sub,
    "synthesize": cmd_synthesize,
    "diag": cmd_diag,
    "synthesize-dec": cmd_synthesize_dec,
    "simulate": cmd_simulate,
    "export-dot": cmd_export_dot,
}


def run(args: argparse.Namespace) -> int:
    try:
        return COMMANDS[args.cmd](args)
    except SpecUnsatisfiableEvenFullyActivated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return UNSAT
    except StateExplosion as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CAP
    except (UsageError, NetsapError, KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
