"""Bat-algorithm optimization library with engineering benchmarks.

Public surface: the engine (:func:`run`, :class:`SwarmConfig`), constraint
handling (:class:`ConstraintHandler`), the benchmark problem registry
(:func:`registry_lookup`, :func:`list_problems`), baseline optimizers
(:func:`run_baseline`), the frame identification benchmark, and the
experiment harness (:func:`run_experiment`).
"""

from .constraints import (
    ConstraintHandler,
    EvaluatedPoint,
    clamp_to_bounds,
    compare,
    normalize_constraints,
    snap_discrete,
)
from .engine import (
    Bat,
    OptimizationResult,
    SwarmConfig,
    SwarmState,
    init_swarm,
    run,
    step,
)
from .problems import (
    KnownBest,
    Problem,
    car_side_impact,
    cantilever_beam,
    heat_exchanger,
    himmelblau,
    list_problems,
    mathematical_problem,
    register_problem,
    registry_lookup,
    speed_reducer,
    three_bar_truss,
)
from .rng import RandomStream, derive_run_seed

from . import fem  # noqa: F401  (registers the identification benchmark)
from .baselines import BaselineConfig, run_baseline
from .harness import ExperimentSpec, RunReport, aggregate, emit_report, run_experiment

__version__ = "0.1.0"
