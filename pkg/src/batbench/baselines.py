"""Reference optimizers: global-best PSO, DE/rand/1/bin, real-coded GA.

Canonical textbook variants sharing the Problem / ConstraintHandler
interfaces, used for algorithm comparisons. All three honor bounds through
the shared clamp and discrete-snap operators, count objective evaluations
exactly, and are bit-reproducible from their seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constraints import ConstraintHandler, EvaluatedPoint, snap_discrete
from .engine import OptimizationResult, _better, _eval_candidate, _feas
from .problems import Problem
from .rng import RandomStream

__all__ = ["BaselineConfig", "run_baseline"]

ALGORITHMS = ("pso", "de", "ga")


@dataclass(frozen=True)
class BaselineConfig:
    """Knobs for the baseline optimizers (standard literature defaults)."""

    algorithm: str
    population: int = 20
    max_evaluations: int = 20000
    seed: int = 0
    # PSO
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    # DE (rand/1/bin)
    de_weight: float = 0.5
    de_crossover: float = 0.9
    # GA (tournament + blend crossover + Gaussian mutation)
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None   # default 1/dimension
    mutation_scale: float = 0.1             # sigma as a fraction of the range
    tournament_size: int = 2
    blend_alpha: float = 0.5
    elite_count: int = 0                    # 0 = pure generational replacement

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.population < 4:
            raise ValueError("population must be >= 4")
        if self.max_evaluations < self.population:
            raise ValueError("evaluation budget must cover the initial population")
        if not 0.0 < self.inertia < 1.0:
            raise ValueError("inertia must be in (0, 1)")
        if not 0.0 < self.de_crossover <= 1.0:
            raise ValueError("de_crossover must be in (0, 1]")
        if self.de_weight <= 0.0:
            raise ValueError("de_weight must be > 0")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0, 1]")
        if self.tournament_size < 2:
            raise ValueError("tournament_size must be >= 2")
        if self.elite_count < 0 or self.elite_count >= self.population:
            raise ValueError("elite_count must be in [0, population)")


class _Budget:
    """Objective-evaluation accounting with a hard cap."""

    def __init__(self, problem: Problem, handler: ConstraintHandler, cap: int):
        self.problem = problem
        self.handler = handler
        self.cap = cap
        self.count = 0

    @property
    def remaining(self) -> int:
        return self.cap - self.count

    def evaluate(self, x):
        obj, viol = _eval_candidate(self.problem, x)
        self.count += 1
        return obj, viol


def _repair(problem: Problem, x: np.ndarray) -> np.ndarray:
    x = np.minimum(np.maximum(x, problem.lower), problem.upper)
    if problem.discrete_sets:
        x = snap_discrete(x, problem.discrete_sets)
    return x


def _init_population(problem: Problem, n: int, gen: np.random.Generator,
                     budget: _Budget):
    d = problem.dimension
    pos = problem.lower + gen.random((n, d)) * (problem.upper - problem.lower)
    obj = np.empty(n)
    viol = np.empty((n, problem.n_constraints))
    for i in range(n):
        pos[i] = _repair(problem, pos[i])
        obj[i], viol[i] = budget.evaluate(pos[i])
    return pos, obj, viol


def _pick_best(obj, viol, handler):
    tol = handler.tolerance
    bi = 0
    for i in range(1, obj.size):
        if _better(obj[i], float(viol[i].sum()), _feas(viol[i], tol),
                   obj[bi], float(viol[bi].sum()), _feas(viol[bi], tol), handler):
            bi = i
    return bi


def run_baseline(problem: Problem, config: BaselineConfig,
                 handler: Optional[ConstraintHandler] = None) -> OptimizationResult:
    """Run a baseline optimizer; result has the same shape as the engine's."""
    if handler is None:
        handler = ConstraintHandler()
    gen = RandomStream(config.seed).generator
    budget = _Budget(problem, handler, config.max_evaluations)
    runner = {"pso": _run_pso, "de": _run_de, "ga": _run_ga}[config.algorithm]
    best_x, best_obj, best_viol, trace = runner(problem, config, handler, gen, budget)
    best = EvaluatedPoint(position=_repair(problem, best_x),
                          objective=float(best_obj), violations=best_viol)
    return OptimizationResult(
        problem_name=problem.name,
        best=best,
        objective_trace=np.asarray(trace),
        evaluation_count=budget.count,
        iterations=len(trace) - 1,
        local_walk_count=0,
        seed=config.seed,
        lane="numpy",
    )


def _run_pso(problem, config, handler, gen, budget):
    n, d = config.population, problem.dimension
    tol = handler.tolerance
    pos, obj, viol = _init_population(problem, n, gen, budget)
    vel = np.zeros((n, d))
    pb_pos = pos.copy()
    pb_obj = obj.copy()
    pb_viol = viol.copy()
    bi = _pick_best(pb_obj, pb_viol, handler)
    gb_pos, gb_obj, gb_viol = pb_pos[bi].copy(), float(pb_obj[bi]), pb_viol[bi].copy()
    trace = [gb_obj]
    while budget.remaining > 0:
        todo = min(n, budget.remaining)
        r1 = gen.random((n, d))
        r2 = gen.random((n, d))
        for i in range(todo):
            vel[i] = (config.inertia * vel[i]
                      + config.cognitive * r1[i] * (pb_pos[i] - pos[i])
                      + config.social * r2[i] * (gb_pos - pos[i]))
            pos[i] = _repair(problem, pos[i] + vel[i])
            obj_i, viol_i = budget.evaluate(pos[i])
            tv, fe = float(viol_i.sum()), _feas(viol_i, tol)
            if _better(obj_i, tv, fe, pb_obj[i], float(pb_viol[i].sum()),
                       _feas(pb_viol[i], tol), handler):
                pb_pos[i] = pos[i].copy()
                pb_obj[i] = obj_i
                pb_viol[i] = viol_i
                if _better(obj_i, tv, fe, gb_obj, float(gb_viol.sum()),
                           _feas(gb_viol, tol), handler):
                    gb_pos, gb_obj, gb_viol = pos[i].copy(), obj_i, viol_i.copy()
        trace.append(gb_obj)
    return gb_pos, gb_obj, gb_viol, trace


def _run_de(problem, config, handler, gen, budget):
    n, d = config.population, problem.dimension
    tol = handler.tolerance
    pos, obj, viol = _init_population(problem, n, gen, budget)
    bi = _pick_best(obj, viol, handler)
    gb_pos, gb_obj, gb_viol = pos[bi].copy(), float(obj[bi]), viol[bi].copy()
    trace = [gb_obj]
    while budget.remaining > 0:
        todo = min(n, budget.remaining)
        for i in range(todo):
            choices = np.empty(3, dtype=np.int64)
            picked = 0
            while picked < 3:
                c = int(gen.integers(0, n))
                if c != i and c not in choices[:picked]:
                    choices[picked] = c
                    picked += 1
            a, b, c = choices
            mutant = pos[a] + config.de_weight * (pos[b] - pos[c])
            jrand = int(gen.integers(0, d))
            cross = gen.random(d) < config.de_crossover
            cross[jrand] = True
            child = np.where(cross, mutant, pos[i])
            child = _repair(problem, child)
            obj_c, viol_c = budget.evaluate(child)
            tv, fe = float(viol_c.sum()), _feas(viol_c, tol)
            # child replaces parent unless strictly worse
            if not _better(obj[i], float(viol[i].sum()), _feas(viol[i], tol),
                           obj_c, tv, fe, handler):
                pos[i] = child
                obj[i] = obj_c
                viol[i] = viol_c
                if _better(obj_c, tv, fe, gb_obj, float(gb_viol.sum()),
                           _feas(gb_viol, tol), handler):
                    gb_pos, gb_obj, gb_viol = child.copy(), obj_c, viol_c.copy()
        trace.append(gb_obj)
    return gb_pos, gb_obj, gb_viol, trace


def _tournament(config, handler, obj, viol, gen):
    tol = handler.tolerance
    n = obj.size
    best = int(gen.integers(0, n))
    for _ in range(config.tournament_size - 1):
        rival = int(gen.integers(0, n))
        if _better(obj[rival], float(viol[rival].sum()), _feas(viol[rival], tol),
                   obj[best], float(viol[best].sum()), _feas(viol[best], tol), handler):
            best = rival
    return best


def _run_ga(problem, config, handler, gen, budget):
    n, d = config.population, problem.dimension
    tol = handler.tolerance
    p_mut = config.mutation_rate if config.mutation_rate is not None else 1.0 / d
    sigma = config.mutation_scale * (problem.upper - problem.lower)
    pos, obj, viol = _init_population(problem, n, gen, budget)
    bi = _pick_best(obj, viol, handler)
    gb_pos, gb_obj, gb_viol = pos[bi].copy(), float(obj[bi]), viol[bi].copy()
    trace = [gb_obj]
    while budget.remaining > 0:
        todo = min(n, budget.remaining)
        new_pos = np.empty((todo, d))
        new_obj = np.empty(todo)
        new_viol = np.empty((todo, problem.n_constraints))
        for i in range(todo):
            p1 = _tournament(config, handler, obj, viol, gen)
            p2 = _tournament(config, handler, obj, viol, gen)
            child = pos[p1].copy()
            if gen.random() < config.crossover_rate:
                # blend crossover: sample around the parents with alpha margin
                lo_g = np.minimum(pos[p1], pos[p2])
                hi_g = np.maximum(pos[p1], pos[p2])
                span = hi_g - lo_g
                a = lo_g - config.blend_alpha * span
                b = hi_g + config.blend_alpha * span
                child = a + (b - a) * gen.random(d)
            mut = gen.random(d) < p_mut
            if mut.any():
                child = child + mut * sigma * gen.standard_normal(d)
            child = _repair(problem, child)
            new_pos[i] = child
            new_obj[i], new_viol[i] = budget.evaluate(child)
            tv, fe = float(new_viol[i].sum()), _feas(new_viol[i], tol)
            if _better(new_obj[i], tv, fe, gb_obj, float(gb_viol.sum()),
                       _feas(gb_viol, tol), handler):
                gb_pos, gb_obj, gb_viol = child.copy(), float(new_obj[i]), new_viol[i].copy()
        if todo == n:
            # generational replacement; optionally carry the best parents over
            if config.elite_count > 0:
                parent_rank = _rank(obj, viol, handler)
                child_rank = _rank(new_obj, new_viol, handler)
                for k in range(config.elite_count):
                    ei = parent_rank[k]
                    wi = child_rank[-(k + 1)]
                    if _better(obj[ei], float(viol[ei].sum()), _feas(viol[ei], tol),
                               new_obj[wi], float(new_viol[wi].sum()),
                               _feas(new_viol[wi], tol), handler):
                        new_pos[wi] = pos[ei]
                        new_obj[wi] = obj[ei]
                        new_viol[wi] = viol[ei]
            pos, obj, viol = new_pos, new_obj, new_viol
        else:
            # partial final generation: merge best offspring into the population
            for i in range(todo):
                wi = _pick_worst(obj, viol, handler)
                if _better(new_obj[i], float(new_viol[i].sum()), _feas(new_viol[i], tol),
                           obj[wi], float(viol[wi].sum()), _feas(viol[wi], tol), handler):
                    pos[wi] = new_pos[i]
                    obj[wi] = new_obj[i]
                    viol[wi] = new_viol[i]
        trace.append(gb_obj)
    return gb_pos, gb_obj, gb_viol, trace


def _pick_worst(obj, viol, handler):
    tol = handler.tolerance
    wi = 0
    for i in range(1, obj.size):
        if _better(obj[wi], float(viol[wi].sum()), _feas(viol[wi], tol),
                   obj[i], float(viol[i].sum()), _feas(viol[i], tol), handler):
            wi = i
    return wi


def _rank(obj, viol, handler):
    """Indices sorted best-first under the handler comparison."""
    import functools

    tol = handler.tolerance

    def cmp(i, j):
        if _better(obj[i], float(viol[i].sum()), _feas(viol[i], tol),
                   obj[j], float(viol[j].sum()), _feas(viol[j], tol), handler):
            return -1
        if _better(obj[j], float(viol[j].sum()), _feas(viol[j], tol),
                   obj[i], float(viol[i].sum()), _feas(viol[i], tol), handler):
            return 1
        return 0

    return sorted(range(obj.size), key=functools.cmp_to_key(cmp))
