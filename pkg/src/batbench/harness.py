"""Experiment orchestration: seeded replicate runs, statistics, reports.

An experiment runs N independent replicates of one (problem, algorithm)
pair, each with a seed derived from the master seed and the run index, and
aggregates best / mean / worst / sample standard deviation over the runs
whose best point is feasible. Reports are emitted as CSV or JSON lines
with one row per run plus a summary row.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .baselines import BaselineConfig, run_baseline
from .constraints import ConstraintHandler
from .engine import SwarmConfig, run
from .problems import registry_lookup
from .rng import derive_run_seed

__all__ = [
    "ExperimentSpec",
    "RunRecord",
    "RunReport",
    "run_experiment",
    "aggregate",
    "emit_report",
    "parse_report",
]

CSV_FIXED_COLUMNS = [
    "problem", "algorithm", "run_index", "seed", "best_objective",
    "feasible", "total_violation", "evaluations",
]


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one experiment."""

    problem: str
    algorithm: str = "ba"              # ba | pso | de | ga
    population: int = 25
    iterations: int = 1000
    runs: int = 50
    master_seed: int = 12345
    handler_mode: str = "feasibility_first"
    penalty_coefficient: float = 1e6
    feasibility_tolerance: float = 1e-9
    engine_options: dict = field(default_factory=dict)    # extra SwarmConfig fields
    baseline_options: dict = field(default_factory=dict)  # extra BaselineConfig fields
    use_numba: Optional[bool] = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.algorithm not in ("ba", "pso", "de", "ga"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    def handler(self) -> ConstraintHandler:
        return ConstraintHandler(mode=self.handler_mode,
                                 penalty_coefficient=self.penalty_coefficient,
                                 tolerance=self.feasibility_tolerance)


@dataclass
class RunRecord:
    run_index: int
    seed: int
    best_objective: float
    feasible: bool
    total_violation: float
    evaluations: int
    position: np.ndarray
    error: Optional[str] = None


@dataclass
class RunReport:
    problem: str
    algorithm: str
    spec: ExperimentSpec
    records: list
    aggregate: dict
    wall_time_s: float


def _run_single(problem, spec: ExperimentSpec, handler, run_index: int) -> RunRecord:
    seed = derive_run_seed(spec.master_seed, run_index)
    if spec.algorithm == "ba":
        config = SwarmConfig(n_bats=spec.population, max_iterations=spec.iterations,
                             seed=seed, **spec.engine_options)
        result = run(problem, config, handler, use_numba=spec.use_numba)
    else:
        # budget matched to the engine's accounting: population * (iterations + 1)
        config = BaselineConfig(algorithm=spec.algorithm, population=spec.population,
                                max_evaluations=spec.population * (spec.iterations + 1),
                                seed=seed, **spec.baseline_options)
        result = run_baseline(problem, config, handler)
    best = result.best
    return RunRecord(
        run_index=run_index,
        seed=seed,
        best_objective=best.objective,
        feasible=handler.is_feasible(best),
        total_violation=best.total_violation,
        evaluations=result.evaluation_count,
        position=best.position.copy(),
    )


def run_experiment(spec: ExperimentSpec) -> RunReport:
    """Execute all replicates and aggregate. A failed replicate is recorded
    with its error and does not abort the siblings."""
    problem = registry_lookup(spec.problem)
    handler = spec.handler()
    records = []
    t0 = time.perf_counter()
    for run_index in range(spec.runs):
        try:
            records.append(_run_single(problem, spec, handler, run_index))
        except Exception as exc:  # noqa: BLE001 - replicate isolation is the point
            records.append(RunRecord(
                run_index=run_index,
                seed=derive_run_seed(spec.master_seed, run_index),
                best_objective=float("nan"),
                feasible=False,
                total_violation=float("nan"),
                evaluations=0,
                position=np.full(problem.dimension, np.nan),
                error=f"{type(exc).__name__}: {exc}",
            ))
    wall = time.perf_counter() - t0
    return RunReport(
        problem=spec.problem,
        algorithm=spec.algorithm,
        spec=spec,
        records=records,
        aggregate=aggregate(records),
        wall_time_s=wall,
    )


def aggregate(records) -> dict:
    """Statistics over feasible-run bests; infeasible runs counted separately.

    best = min, worst = max, mean, and sample standard deviation (n - 1
    denominator; reported as 0.0 and flagged when only one feasible run).
    With zero feasible runs the statistics are absent (None), not zeroed.
    """
    if not records:
        raise ValueError("no run records to aggregate")
    ok = [r for r in records if r.error is None]
    feasible = sorted((r.best_objective for r in ok if r.feasible))
    n_feas = len(feasible)
    out = {
        "n_runs": len(records),
        "n_failed": len(records) - len(ok),
        "n_feasible": n_feas,
        "n_infeasible": len(ok) - n_feas,
        "best": None,
        "worst": None,
        "mean": None,
        "std": None,
        "single_feasible_run": n_feas == 1,
    }
    if n_feas > 0:
        arr = np.asarray(feasible)
        out["best"] = float(arr.min())
        out["worst"] = float(arr.max())
        out["mean"] = float(arr.mean())
        out["std"] = float(arr.std(ddof=1)) if n_feas > 1 else 0.0
    return out


def _spec_dict(spec: ExperimentSpec) -> dict:
    d = asdict(spec)
    d.pop("use_numba", None)
    return d


def emit_report(report: RunReport, path: str, fmt: str = "csv") -> str:
    """Write the report to ``path``.

    CSV columns are fixed: problem, algorithm, run_index, seed,
    best_objective, feasible, total_violation, evaluations, then x_1..x_d.
    The appended summary row has run_index = "summary" and reuses the
    columns as: seed = master seed, best_objective = aggregate best,
    feasible = number of feasible runs, total_violation = number of runs,
    evaluations = total evaluations, x_i = position of the best feasible
    run (blank when none). JSON-lines carries the same per-run fields plus
    a final summary object with the full aggregate, spec echo and wall
    time. Wall time is excluded from determinism guarantees, so it never
    appears in the CSV format.
    """
    if fmt == "csv":
        _emit_csv(report, path)
    elif fmt == "jsonl":
        _emit_jsonl(report, path)
    else:
        raise ValueError(f"format must be 'csv' or 'jsonl', got {fmt!r}")
    return path


def _best_feasible_record(report: RunReport):
    feas = [r for r in report.records if r.error is None and r.feasible]
    if not feas:
        return None
    return min(feas, key=lambda r: r.best_objective)


def _emit_csv(report: RunReport, path: str) -> None:
    d = report.records[0].position.size
    header = CSV_FIXED_COLUMNS + [f"x_{k}" for k in range(1, d + 1)]
    agg = report.aggregate
    best_rec = _best_feasible_record(report)
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write report to {path!r}: {exc}") from exc
    with fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in report.records:
            writer.writerow(
                [report.problem, report.algorithm, r.run_index, r.seed,
                 repr(r.best_objective), int(r.feasible), repr(r.total_violation),
                 r.evaluations] + [repr(v) for v in r.position])
        summary_pos = [""] * d if best_rec is None else [repr(v) for v in best_rec.position]
        writer.writerow(
            [report.problem, report.algorithm, "summary", report.spec.master_seed,
             "" if agg["best"] is None else repr(agg["best"]),
             agg["n_feasible"], agg["n_runs"],
             sum(r.evaluations for r in report.records)] + summary_pos)


def _emit_jsonl(report: RunReport, path: str) -> None:
    try:
        fh = open(path, "w")
    except OSError as exc:
        raise OSError(f"cannot write report to {path!r}: {exc}") from exc
    with fh:
        for r in report.records:
            rec = {
                "problem": report.problem,
                "algorithm": report.algorithm,
                "run_index": r.run_index,
                "seed": r.seed,
                "best_objective": r.best_objective,
                "feasible": r.feasible,
                "total_violation": r.total_violation,
                "evaluations": r.evaluations,
                "position": r.position.tolist(),
            }
            if r.error is not None:
                rec["error"] = r.error
            fh.write(json.dumps(rec) + "\n")
        fh.write(json.dumps({
            "run_index": "summary",
            "problem": report.problem,
            "algorithm": report.algorithm,
            "aggregate": report.aggregate,
            "spec": _spec_dict(report.spec),
            "wall_time_s": report.wall_time_s,
        }) + "\n")


def parse_report(path: str, fmt: str = "csv"):
    """Read an emitted report back: (per-run rows, summary row/object)."""
    if fmt == "csv":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        summary = rows[-1]
        if summary["run_index"] != "summary":
            raise ValueError(f"{path}: missing summary row")
        return rows[:-1], summary
    if fmt == "jsonl":
        with open(path) as fh:
            objs = [json.loads(line) for line in fh if line.strip()]
        summary = objs[-1]
        if summary.get("run_index") != "summary":
            raise ValueError(f"{path}: missing summary object")
        return objs[:-1], summary
    raise ValueError(f"format must be 'csv' or 'jsonl', got {fmt!r}")
