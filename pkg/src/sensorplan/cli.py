"""Command-line entry point: gen, solve, eval, sweep.

Exit status is 0 on success, 1 when input fails validation, 2 when a file
cannot be read or written.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import harness
from .io import load_instance, load_plan, save_instance, save_plan
from .model import ValidationError
from .planners import PLANNERS, evaluate_plan, plan_problems

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


def _rt(text: str) -> float:
    if text.lower() == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}") from None


def _range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in lo:hi:step, got {text!r}") from None
    return lo, hi, step


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sensorplan", description="Mobile sensor deployment planner.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--sensors", type=int, required=True)
    g.add_argument("--targets", type=int, required=True)
    g.add_argument("--field", type=float, nargs=2, metavar=("W", "H"), default=(600.0, 600.0))
    g.add_argument("--rs", type=float, default=20.0)
    g.add_argument("--rt", type=_rt, default=20.0, help="transmission range or 'inf'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--unit-weights", action="store_true", help="give every target weight 1")
    g.add_argument("-o", "--output", required=True)

    s = sub.add_parser("solve", help="plan a deployment for an instance")
    s.add_argument("--algo", choices=sorted(PLANNERS), required=True)
    s.add_argument("-i", "--instance", required=True)
    s.add_argument("-o", "--output", required=True)

    e = sub.add_parser("eval", help="print metrics of a plan as JSON")
    e.add_argument("-i", "--instance", required=True)
    e.add_argument("-p", "--plan", required=True)

    w = sub.add_parser("sweep", help="run a seeded scenario sweep and write CSV")
    w.add_argument("--scenario", choices=harness.SCENARIOS, required=True)
    w.add_argument("--param", choices=harness.PARAMS, required=True)
    w.add_argument("--range", type=_range, required=True, metavar="LO:HI:STEP")
    w.add_argument("--trials", type=int, default=50)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--sensors", type=int, default=None, help="sensor count when not swept")
    w.add_argument("--targets", type=int, default=30, help="target count when not swept")
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--timing", action="store_true", help="fill the ms column (output no longer reproducible)")
    w.add_argument("--plans-dir", default=None, help="also write every instance and plan here")
    w.add_argument("-o", "--output", required=True)
    return parser


def _metrics_json(inst, plan) -> dict:
    m = evaluate_plan(inst, plan)
    return {
        "algorithm": plan.algorithm,
        "covered_weight": m.covered_weight,
        "covered_targets": sorted(m.covered_target_ids),
        "total_movement": m.total_movement,
        "sensors_used": m.sensors_used,
        "connected": m.connected,
    }


def _cmd_gen(args) -> int:
    params = harness.InstanceParams(
        sensors=args.sensors, targets=args.targets, width=args.field[0], height=args.field[1],
        rs=args.rs, rt=args.rt, unit_weights=args.unit_weights,
    )
    save_instance(args.output, harness.gen_instance(params, args.seed))
    return EXIT_OK


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    plan = PLANNERS[args.algo](inst)
    save_plan(args.output, plan)
    print(json.dumps(_metrics_json(inst, plan)))
    return EXIT_OK


def _cmd_eval(args) -> int:
    inst = load_instance(args.instance)
    plan = load_plan(args.plan)
    problems = plan_problems(inst, plan)
    if problems:
        for p in problems:
            print(f"invalid plan: {p}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps(_metrics_json(inst, plan)))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    lo, hi, step = args.range
    spec = harness.ScenarioSpec(
        args.scenario, args.param, lo, hi, step, trials=args.trials, seed=args.seed,
        sensors=args.sensors, targets=args.targets,
    )
    rows = harness.run_sweep(spec, workers=args.workers, plan_dir=args.plans_dir)
    Path(args.output).write_text(harness.rows_to_csv(rows, timing=args.timing), encoding="utf-8")
    return EXIT_OK


COMMANDS = {"gen": _cmd_gen, "solve": _cmd_solve, "eval": _cmd_eval, "sweep": _cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; usage errors are validation errors here
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
