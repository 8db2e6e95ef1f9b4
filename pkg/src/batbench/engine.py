"""Bat-algorithm engine: swarm state, per-iteration update rules, main loop.

The engine searches on the unit box internally: positions and velocities
are kept in normalized coordinates z in [0, 1]^d and mapped affinely to
problem units only for evaluation and reporting. This makes the pulse-pace
moves and the loudness-scaled local walk behave identically regardless of
the problem's physical scales (the frequency range is meant to be chosen
relative to the domain size, which normalization realizes once and for
all). Bat and swarm accessors expose positions in problem units.

Randomness is consumed from a single per-run stream in a fixed order:
at initialization, for each bat in index order, d position draws, then
frequency, loudness and initial pulse rate; in each iteration, for each
bat in index order, the frequency draw beta, the walk gate draw, the d
walk offsets (only when the walk triggers and the mean loudness is
positive), and the acceptance draw. The compiled kernel replicates this
order exactly, so both execution paths follow the same trajectory for a
given seed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constraints import ConstraintHandler, EvaluatedPoint, clamp_to_bounds, snap_discrete
from .problems import Problem
from .rng import RandomStream

__all__ = [
    "SwarmConfig",
    "Bat",
    "SwarmState",
    "OptimizationResult",
    "draw_frequency",
    "update_velocity",
    "update_position",
    "local_walk",
    "update_loudness",
    "update_pulse_rate",
    "init_swarm",
    "step",
    "run",
]

PULSE_CLOCKS = ("acceptance", "iteration")


@dataclass(frozen=True)
class SwarmConfig:
    """Engine parameters.

    Defaults follow the standard recipe: frequency range [0, 100], decay
    and saturation constants alpha = gamma = 0.9, initial loudness uniform
    in [1, 2], initial pulse rate uniform in [0, 1].

    ``pulse_clock`` selects what drives the pulse-rate saturation: the
    bat's own acceptance count (default) or the global iteration number.
    ``always_accept``, ``freeze_schedules`` and ``pulse_rate_override`` are
    analysis switches used to study limiting behavior; they are off in
    normal operation.
    """

    n_bats: int = 25
    max_iterations: int = 1000
    f_min: float = 0.0
    f_max: float = 100.0
    alpha: float = 0.9
    gamma: float = 0.9
    loudness_init_range: tuple = (1.0, 2.0)
    pulse_init_range: tuple = (0.0, 1.0)
    seed: int = 0
    pulse_clock: str = "acceptance"
    always_accept: bool = False
    freeze_schedules: bool = False
    pulse_rate_override: Optional[float] = None

    def __post_init__(self):
        if self.n_bats < 1:
            raise ValueError("n_bats must be >= 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not self.f_min < self.f_max:
            raise ValueError("need f_min < f_max")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be > 0")
        for name, rng_ in (("loudness_init_range", self.loudness_init_range),
                           ("pulse_init_range", self.pulse_init_range)):
            lo, hi = rng_
            if lo > hi or lo < 0.0:
                raise ValueError(f"{name} must satisfy 0 <= lo <= hi, got {rng_}")
        if self.pulse_clock not in PULSE_CLOCKS:
            raise ValueError(f"pulse_clock must be one of {PULSE_CLOCKS}")
        if self.pulse_rate_override is not None and not 0.0 <= self.pulse_rate_override <= 1.0:
            raise ValueError("pulse_rate_override must be in [0, 1]")


@dataclass(frozen=True, eq=False)
class Bat:
    """Read-only view of one swarm member, in problem units."""

    position: np.ndarray
    velocity: np.ndarray
    frequency: float
    loudness: float
    pulse_rate: float
    initial_pulse_rate: float
    best_eval: EvaluatedPoint
    acceptance_count: int


@dataclass(eq=False)
class SwarmState:
    """Full mutable state of one run. Array-of-bats layout, z coordinates."""

    problem: Problem
    z: np.ndarray                 # (n, d) accepted positions, unit box
    vel: np.ndarray               # (n, d) velocities, unit box units
    freq: np.ndarray              # (n,)
    loudness: np.ndarray          # (n,)
    pulse_rate: np.ndarray        # (n,)
    pulse_init: np.ndarray        # (n,) saturation targets r_i^0
    accept_count: np.ndarray      # (n,) int64
    best_obj: np.ndarray          # (n,) objective of each bat's accepted point
    best_viol: np.ndarray         # (n, m) violations of each bat's accepted point
    gbest_z: np.ndarray           # (d,)
    gbest_obj: float
    gbest_viol: np.ndarray        # (m,)
    iteration: int = 0
    evaluation_count: int = 0
    local_walk_count: int = 0

    @property
    def width(self) -> np.ndarray:
        return self.problem.upper - self.problem.lower

    def to_x(self, z: np.ndarray) -> np.ndarray:
        return self.problem.lower + z * self.width

    @property
    def global_best(self) -> EvaluatedPoint:
        x = self.to_x(self.gbest_z)
        if self.problem.discrete_sets:
            x = snap_discrete(x, self.problem.discrete_sets)
        return EvaluatedPoint(
            position=x,
            objective=float(self.gbest_obj),
            violations=self.gbest_viol.copy(),
        )

    @property
    def bats(self) -> list[Bat]:
        w = self.width
        out = []
        for i in range(self.z.shape[0]):
            x = self.to_x(self.z[i])
            out.append(Bat(
                position=x,
                velocity=self.vel[i] * w,
                frequency=float(self.freq[i]),
                loudness=float(self.loudness[i]),
                pulse_rate=float(self.pulse_rate[i]),
                initial_pulse_rate=float(self.pulse_init[i]),
                best_eval=EvaluatedPoint(
                    position=x.copy(),
                    objective=float(self.best_obj[i]),
                    violations=self.best_viol[i].copy(),
                ),
                acceptance_count=int(self.accept_count[i]),
            ))
        return out


@dataclass(eq=False)
class OptimizationResult:
    """Outcome of a run: best point, trace and accounting."""

    problem_name: str
    best: EvaluatedPoint
    objective_trace: np.ndarray   # best objective after init and each iteration
    evaluation_count: int
    iterations: int
    local_walk_count: int
    seed: int
    lane: str                     # "numba" or "numpy"

    @property
    def best_objective(self) -> float:
        return self.best.objective


# ----------------------------------------------------------------------
# Update rules (pure functions; the engine applies them in z coordinates)
# ----------------------------------------------------------------------

def draw_frequency(config: SwarmConfig, beta: float) -> float:
    """Pace factor f = f_min + (f_max - f_min) * beta, beta in [0, 1]."""
    return config.f_min + (config.f_max - config.f_min) * beta


def update_velocity(v_prev: np.ndarray, x: np.ndarray, x_star: np.ndarray, f: float) -> np.ndarray:
    """v + (x - x_star) * f, componentwise."""
    if v_prev.shape != x.shape or x.shape != x_star.shape:
        raise ValueError("velocity update: vector length mismatch")
    return v_prev + (x - x_star) * f

def update_position(x_prev: np.ndarray, v: np.ndarray) -> np.ndarray:
    """x + v, componentwise. Caller applies bound repair afterwards."""
    if x_prev.shape != v.shape:
        raise ValueError("position update: vector length mismatch")
    return x_prev + v


def local_walk(x_base: np.ndarray, mean_loudness: float, stream: RandomStream) -> np.ndarray:
    """Random walk around x_base: independent offsets in [-A, A] per component,
    where A is the swarm's average loudness at this time step."""
    if mean_loudness <= 0.0:
        raise ValueError(f"mean_loudness must be > 0, got {mean_loudness}")
    d = x_base.size
    out = np.empty(d)
    for k in range(d):
        eps = -1.0 + 2.0 * stream.uniform01()
        out[k] = x_base[k] + eps * mean_loudness
    return out


def update_loudness(a: float, alpha: float) -> float:
    """Geometric decay a -> alpha * a."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return alpha * a


def update_pulse_rate(r0: float, gamma: float, t: int) -> float:
    """Saturating growth r = r0 * (1 - exp(-gamma * t)); r(0) = 0, r(inf) = r0."""
    if gamma <= 0.0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if t < 0:
        raise ValueError("t must be >= 0")
    return r0 * (1.0 - np.exp(-gamma * t))


# ----------------------------------------------------------------------
# Engine
# ----------------------------------------------------------------------

def _eval_candidate(problem: Problem, x: np.ndarray):
    g = np.empty(problem.n_constraints)
    obj = float(problem.raw(x, g))
    viol = np.maximum(g, 0.0)
    return obj, viol


def _better(obj_a: float, tv_a: float, fe_a: bool,
            obj_b: float, tv_b: float, fe_b: bool,
            handler: ConstraintHandler) -> bool:
    """Scalar form of the handler comparison (a strictly better than b)."""
    if handler.mode == "static_penalty":
        return obj_a + handler.penalty_coefficient * tv_a < obj_b + handler.penalty_coefficient * tv_b
    if fe_a != fe_b:
        return fe_a
    if fe_a:
        return obj_a < obj_b
    if tv_a != tv_b:
        return tv_a < tv_b
    return obj_a < obj_b


def _feas(viol: np.ndarray, tol: float) -> bool:
    return bool(viol.size == 0 or np.max(viol) <= tol)


def _snap_z(problem: Problem, z: np.ndarray, width: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map z to problem units, snap discrete coordinates, and return (x, z)
    with the z entries of snapped coordinates adjusted to match x."""
    x = problem.lower + z * width
    if problem.discrete_sets:
        x = snap_discrete(x, problem.discrete_sets)
        z = z.copy()
        for k in problem.discrete_sets:
            z[k] = (x[k] - problem.lower[k]) / width[k] if width[k] > 0 else 0.0
    return x, z


def init_swarm(problem: Problem, config: SwarmConfig, stream: RandomStream,
               handler: Optional[ConstraintHandler] = None) -> SwarmState:
    """Build and evaluate the initial swarm.

    Positions are uniform within bounds, velocities zero, frequencies
    uniform in [f_min, f_max], loudness uniform in its init range, and the
    pulse-rate saturation target r_i^0 uniform in its init range with the
    live pulse rate starting at zero. The handler (feasibility-first when
    omitted) picks the initial global best.
    """
    d = problem.dimension
    n = config.n_bats
    width = problem.upper - problem.lower
    z = np.empty((n, d))
    freq = np.empty(n)
    loud = np.empty(n)
    pulse0 = np.empty(n)
    best_obj = np.empty(n)
    best_viol = np.empty((n, problem.n_constraints))
    llo, lhi = config.loudness_init_range
    plo, phi = config.pulse_init_range
    for i in range(n):
        for k in range(d):
            z[i, k] = stream.uniform01()
        freq[i] = config.f_min + (config.f_max - config.f_min) * stream.uniform01()
        loud[i] = llo + (lhi - llo) * stream.uniform01()
        pulse0[i] = plo + (phi - plo) * stream.uniform01()
        x, z[i] = _snap_z(problem, z[i], width)
        best_obj[i], best_viol[i] = _eval_candidate(problem, x)

    pulse = np.zeros(n)
    if config.pulse_rate_override is not None:
        pulse[:] = config.pulse_rate_override

    if handler is None:
        handler = ConstraintHandler()
    bi = 0
    for i in range(1, n):
        if _better(best_obj[i], best_viol[i].sum(), _feas(best_viol[i], handler.tolerance),
                   best_obj[bi], best_viol[bi].sum(), _feas(best_viol[bi], handler.tolerance),
                   handler):
            bi = i
    return SwarmState(
        problem=problem,
        z=z,
        vel=np.zeros((n, d)),
        freq=freq,
        loudness=loud,
        pulse_rate=pulse,
        pulse_init=pulse0,
        accept_count=np.zeros(n, dtype=np.int64),
        best_obj=best_obj,
        best_viol=best_viol,
        gbest_z=z[bi].copy(),
        gbest_obj=float(best_obj[bi]),
        gbest_viol=best_viol[bi].copy(),
        iteration=0,
        evaluation_count=n,
    )


def step(state: SwarmState, problem: Problem, config: SwarmConfig,
         handler: ConstraintHandler, stream: RandomStream) -> SwarmState:
    """Advance the swarm by one iteration, mutating and returning ``state``."""
    n, d = state.z.shape
    width = state.width
    tol = handler.tolerance
    # average loudness for this time step
    s = 0.0
    for i in range(n):
        s += state.loudness[i]
    mean_loud = s / n

    gb_tv = float(state.gbest_viol.sum())
    gb_fe = _feas(state.gbest_viol, tol)
    t_next = state.iteration + 1
    for i in range(n):
        beta = stream.uniform01()
        f = draw_frequency(config, beta)
        state.freq[i] = f
        state.vel[i] = update_velocity(state.vel[i], state.z[i], state.gbest_z, f)
        cand = update_position(state.z[i], state.vel[i])
        gate = stream.uniform01()
        if gate > state.pulse_rate[i]:
            state.local_walk_count += 1
            if mean_loud > 0.0:
                cand = local_walk(state.gbest_z, mean_loud, stream)
            else:
                cand = state.gbest_z.copy()
        cand = np.minimum(np.maximum(cand, 0.0), 1.0)
        x, cand = _snap_z(problem, cand, width)
        obj, viol = _eval_candidate(problem, x)
        state.evaluation_count += 1
        tv = float(viol.sum())
        fe = _feas(viol, tol)
        accept_draw = stream.uniform01()
        if config.always_accept:
            accepted = True
        else:
            accepted = accept_draw < state.loudness[i] and _better(
                obj, tv, fe, state.best_obj[i], float(state.best_viol[i].sum()),
                _feas(state.best_viol[i], tol), handler)
        if accepted:
            state.z[i] = cand
            state.best_obj[i] = obj
            state.best_viol[i] = viol
            state.accept_count[i] += 1
            if not config.freeze_schedules:
                state.loudness[i] = update_loudness(state.loudness[i], config.alpha) \
                    if state.loudness[i] > 0.0 else 0.0
                if config.pulse_rate_override is None:
                    clock = t_next if config.pulse_clock == "iteration" else int(state.accept_count[i])
                    state.pulse_rate[i] = update_pulse_rate(state.pulse_init[i], config.gamma, clock)
        if _better(obj, tv, fe, state.gbest_obj, gb_tv, gb_fe, handler):
            state.gbest_z = cand.copy()
            state.gbest_obj = obj
            state.gbest_viol = viol
            gb_tv, gb_fe = tv, fe
    state.iteration = t_next
    return state


def _numba_enabled() -> bool:
    if os.environ.get("BATBENCH_DISABLE_NUMBA", ""):
        return False
    from . import kernels

    return kernels.NUMBA_AVAILABLE


def run(problem: Problem, config: SwarmConfig,
        handler: Optional[ConstraintHandler] = None,
        use_numba: Optional[bool] = None) -> OptimizationResult:
    """Run the bat algorithm: init_swarm followed by max_iterations steps.

    ``use_numba`` selects the execution lane explicitly; by default the
    compiled kernel is used when numba is importable and the environment
    variable BATBENCH_DISABLE_NUMBA is not set. Both lanes consume the
    random stream in the same order and implement identical semantics.
    """
    if handler is None:
        handler = ConstraintHandler()
    if use_numba is None:
        use_numba = _numba_enabled()
    if use_numba:
        from . import kernels

        return kernels.run_compiled(problem, config, handler)

    stream = RandomStream(config.seed)
    state = init_swarm(problem, config, stream, handler)
    trace = np.empty(config.max_iterations + 1)
    trace[0] = state.gbest_obj
    for t in range(config.max_iterations):
        step(state, problem, config, handler, stream)
        trace[t + 1] = state.gbest_obj
    return OptimizationResult(
        problem_name=problem.name,
        best=state.global_best,
        objective_trace=trace,
        evaluation_count=state.evaluation_count,
        iterations=state.iteration,
        local_walk_count=state.local_walk_count,
        seed=config.seed,
        lane="numpy",
    )
