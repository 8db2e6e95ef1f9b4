"""Command line interface.

Subcommands:
  run            execute a seeded multi-run experiment and write a report
  list-problems  show registered benchmark problems
  describe       dump one problem's definition as JSON
  bench          time the compiled kernel lane against the numpy fallback

A JSON config file can mirror every ``run`` flag; explicit flags override
file values. Exit status is nonzero when an experiment ends with zero
feasible runs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .constraints import ConstraintHandler
from .engine import SwarmConfig, run
from .harness import ExperimentSpec, emit_report, run_experiment
from .problems import list_problems, registry_lookup

HANDLER_ALIASES = {"feasibility": "feasibility_first", "penalty": "static_penalty"}

_RUN_KEYS = [
    "problem", "algorithm", "population", "iterations", "runs", "seed",
    "handler", "penalty_coefficient", "f_min", "f_max", "alpha", "gamma",
    "pulse_clock", "out", "format",
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="batbench",
        description="Bat-algorithm optimizer and engineering benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a seeded multi-run experiment")
    p_run.add_argument("--config", help="JSON file mirroring the flags below")
    p_run.add_argument("--problem")
    p_run.add_argument("--algorithm", choices=["ba", "pso", "de", "ga"])
    p_run.add_argument("--bats", "--pop", dest="population", type=int,
                       help="population size (bats for ba)")
    p_run.add_argument("--iters", dest="iterations", type=int)
    p_run.add_argument("--runs", type=int)
    p_run.add_argument("--seed", type=int, help="master seed (decimal integer)")
    p_run.add_argument("--handler", choices=["feasibility", "penalty"])
    p_run.add_argument("--penalty-coefficient", dest="penalty_coefficient", type=float)
    p_run.add_argument("--f-min", dest="f_min", type=float)
    p_run.add_argument("--f-max", dest="f_max", type=float)
    p_run.add_argument("--alpha", type=float)
    p_run.add_argument("--gamma", type=float)
    p_run.add_argument("--pulse-clock", dest="pulse_clock",
                       choices=["acceptance", "iteration"])
    p_run.add_argument("--out", help="report path")
    p_run.add_argument("--format", choices=["csv", "jsonl"])

    sub.add_parser("list-problems", help="list registered problems")

    p_desc = sub.add_parser("describe", help="dump a problem definition")
    p_desc.add_argument("--problem", required=True)

    p_bench = sub.add_parser("bench", help="compare compiled and numpy lanes")
    p_bench.add_argument("--problem", default="three_bar_truss")
    p_bench.add_argument("--bats", dest="population", type=int, default=25)
    p_bench.add_argument("--iters", dest="iterations", type=int, default=1000)
    p_bench.add_argument("--repeats", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=0)
    return parser


_RUN_DEFAULTS = {
    "problem": None,
    "algorithm": "ba",
    "population": 25,
    "iterations": 1000,
    "runs": 50,
    "seed": 12345,
    "handler": "feasibility",
    "penalty_coefficient": 1e6,
    "f_min": None,
    "f_max": None,
    "alpha": None,
    "gamma": None,
    "pulse_clock": None,
    "out": None,
    "format": "csv",
}


def _merge_run_options(args) -> dict:
    options = dict(_RUN_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            file_opts = json.load(fh)
        unknown = set(file_opts) - set(_RUN_KEYS)
        if unknown:
            raise SystemExit(f"config file has unknown keys: {sorted(unknown)}")
        options.update(file_opts)
    for key in _RUN_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            options[key] = val
    if not options["problem"]:
        raise SystemExit("a problem must be given via --problem or the config file")
    return options


def _cmd_run(args) -> int:
    opts = _merge_run_options(args)
    engine_options = {}
    for key in ("f_min", "f_max", "alpha", "gamma", "pulse_clock"):
        if opts[key] is not None:
            engine_options[key] = opts[key]
    spec = ExperimentSpec(
        problem=opts["problem"],
        algorithm=opts["algorithm"],
        population=opts["population"],
        iterations=opts["iterations"],
        runs=opts["runs"],
        master_seed=opts["seed"],
        handler_mode=HANDLER_ALIASES[opts["handler"]],
        penalty_coefficient=opts["penalty_coefficient"],
        engine_options=engine_options,
    )
    report = run_experiment(spec)
    agg = report.aggregate
    if opts["out"]:
        emit_report(report, opts["out"], opts["format"])
        print(f"wrote {opts['format']} report to {opts['out']}")
    print(f"problem={report.problem} algorithm={report.algorithm} "
          f"runs={agg['n_runs']} feasible={agg['n_feasible']} failed={agg['n_failed']}")
    if agg["best"] is not None:
        print(f"best={agg['best']:.6f} mean={agg['mean']:.6f} "
              f"worst={agg['worst']:.6f} std={agg['std']:.6f}")
    else:
        print("no feasible runs")
        return 1
    return 0


def _cmd_list(_args) -> int:
    for name in list_problems():
        problem = registry_lookup(name)
        print(f"{name:24s} d={problem.dimension:3d} constraints={problem.n_constraints}")
    return 0


def _cmd_describe(args) -> int:
    try:
        problem = registry_lookup(args.problem)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 2
    print(json.dumps(problem.describe(), indent=2))
    return 0


def _cmd_bench(args) -> int:
    from . import kernels

    problem = registry_lookup(args.problem)
    config = SwarmConfig(n_bats=args.population, max_iterations=args.iterations,
                         seed=args.seed)
    handler = ConstraintHandler()
    rows = []
    for lane, use_numba in (("numba", True), ("numpy", False)):
        if use_numba and not kernels.NUMBA_AVAILABLE:
            print("numba unavailable; skipping compiled lane")
            continue
        if use_numba:
            run(problem, config, handler, use_numba=True)  # warm-up compile
        times = []
        best = None
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            result = run(problem, config, handler, use_numba=use_numba)
            times.append(time.perf_counter() - t0)
            best = result.best.objective
        rows.append((lane, min(times), best))
        print(f"{lane:6s} best_time={min(times):.4f}s "
              f"mean_time={np.mean(times):.4f}s best_objective={best:.6f}")
    if len(rows) == 2:
        print(f"speedup (numpy / numba): {rows[1][1] / rows[0][1]:.1f}x")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "list-problems": _cmd_list,
        "describe": _cmd_describe,
        "bench": _cmd_bench,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
