"""Engineering benchmark problems.

Each problem is an immutable :class:`Problem`: objective, one-sided
inequality constraints (g(x) <= 0), box bounds, optional discrete value
sets, and an optional known-best record with provenance. Double-sided
limits L <= g <= U are expanded into the pair (L - g, g - U) at
construction, in definition order.

The raw evaluators are written in scalar numba-compatible style
(``raw(x, g_out) -> objective``) so the same source serves both the plain
numpy path and the compiled kernel path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .constraints import EvaluatedPoint

__all__ = [
    "Problem",
    "KnownBest",
    "mathematical_problem",
    "himmelblau",
    "three_bar_truss",
    "speed_reducer",
    "cantilever_beam",
    "heat_exchanger",
    "car_side_impact",
    "registry_lookup",
    "list_problems",
    "register_problem",
]


@dataclass(frozen=True, eq=False)
class KnownBest:
    position: np.ndarray
    objective: float
    provenance: str


@dataclass(eq=False)
class Problem:
    """Immutable optimization problem definition (minimization)."""

    name: str
    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    n_constraints: int
    raw: Callable  # raw(x, g_out) -> objective; fills g_out with one-sided values
    discrete_sets: dict = field(default_factory=dict)
    known_best: Optional[KnownBest] = None
    notes: str = ""

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != (self.dimension,) or self.upper.shape != (self.dimension,):
            raise ValueError(f"{self.name}: bounds shape does not match dimension")
        if np.any(self.lower > self.upper):
            raise ValueError(f"{self.name}: lower bound exceeds upper bound")
        self.discrete_sets = {
            int(k): np.sort(np.asarray(v, dtype=float)) for k, v in self.discrete_sets.items()
        }
        self._compiled = None

    def objective(self, x) -> float:
        g = np.empty(self.n_constraints)
        return float(self.raw(np.asarray(x, dtype=float), g))

    def constraint_values(self, x) -> np.ndarray:
        """One-sided constraint values g(x); feasible when all <= 0."""
        g = np.empty(self.n_constraints)
        self.raw(np.asarray(x, dtype=float), g)
        return g

    @property
    def constraints(self) -> tuple:
        """Per-constraint callables, one for each one-sided entry."""
        return tuple(
            (lambda x, k=k: float(self.constraint_values(x)[k]))
            for k in range(self.n_constraints)
        )

    def evaluate(self, x) -> EvaluatedPoint:
        x = np.asarray(x, dtype=float)
        g = np.empty(self.n_constraints)
        obj = float(self.raw(x, g))
        return EvaluatedPoint(position=x.copy(), objective=obj, violations=np.maximum(g, 0.0))

    def compiled_raw(self):
        """The raw evaluator compiled with numba, or None when unavailable."""
        if self._compiled is None:
            from . import kernels

            self._compiled = kernels.compile_raw(self.raw)
        return self._compiled

    def describe(self) -> dict:
        """Structured description of the definition for documentation dumps."""
        out = {
            "name": self.name,
            "dimension": self.dimension,
            "n_constraints": self.n_constraints,
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "discrete_sets": {str(k): v.tolist() for k, v in self.discrete_sets.items()},
        }
        if self.known_best is not None:
            out["known_best"] = {
                "position": self.known_best.position.tolist(),
                "objective": self.known_best.objective,
                "provenance": self.known_best.provenance,
            }
        if self.notes:
            out["notes"] = self.notes
        return out


# ----------------------------------------------------------------------
# Case: constrained quadratic-quartic mathematical benchmark.
# f = sum sqrt(i) (x_i - 1)^2 + (sum x_i^2 - 25)^2, blocks of four
# variables carry a double-sided linear constraint 0 <= g_j <= 30.
# ----------------------------------------------------------------------

def _make_mathematical_raw(n):
    sqrt_i = np.sqrt(np.arange(1.0, n + 1.0))

    def raw(x, g):
        acc = 0.0
        sq = 0.0
        for i in range(n):
            d = x[i] - 1.0
            acc += sqrt_i[i] * d * d
            sq += x[i] * x[i]
        t = sq - 25.0
        obj = acc + t * t
        for j in range(n // 4):
            b = 4 * j
            gj = x[b] + 2.0 * x[b + 1] + 3.0 * x[b + 2] + 4.0 * x[b + 3] - 20.0
            g[2 * j] = -gj          # 0 <= g_j
            g[2 * j + 1] = gj - 30.0  # g_j <= 30
        return obj

    return raw


def mathematical_problem(n: int) -> Problem:
    """Block-constrained mathematical benchmark with n variables (n = 4k)."""
    if n <= 0 or n % 4 != 0:
        raise ValueError(f"n must be a positive multiple of 4, got {n}")
    return Problem(
        name=f"mathematical_{n}",
        dimension=n,
        lower=np.full(n, 0.5),
        upper=np.full(n, 10.0),
        n_constraints=n // 2,
        raw=_make_mathematical_raw(n),
    )


# ----------------------------------------------------------------------
# Case: Himmelblau's five-variable process design problem.
# Three double-sided nonlinear constraints expand to six one-sided ones.
# ----------------------------------------------------------------------

def _himmelblau_raw(x, g):
    x1 = x[0]
    x2 = x[1]
    x3 = x[2]
    x4 = x[3]
    x5 = x[4]
    obj = 5.3578547 * x3 * x3 + 0.8356891 * x1 * x5 + 37.293239 * x1 - 40792.141
    g1 = 85.334407 + 0.0056858 * x2 * x5 + 0.0006262 * x1 * x4 - 0.0022053 * x3 * x5
    g2 = 80.51249 + 0.0071317 * x2 * x5 + 0.0029955 * x1 * x2 + 0.0021813 * x3 * x3
    g3 = 9.300961 + 0.0047026 * x3 * x5 + 0.0012547 * x1 * x3 + 0.0019085 * x3 * x4
    g[0] = -g1          # 0 <= g1
    g[1] = g1 - 92.0    # g1 <= 92
    g[2] = 90.0 - g2    # 90 <= g2
    g[3] = g2 - 110.0   # g2 <= 110
    g[4] = 20.0 - g3    # 20 <= g3
    g[5] = g3 - 25.0    # g3 <= 25
    return obj


def himmelblau() -> Problem:
    """Himmelblau's nonlinear optimization problem (5 variables, 6 one-sided constraints)."""
    return Problem(
        name="himmelblau",
        dimension=5,
        lower=np.array([78.0, 33.0, 27.0, 27.0, 27.0]),
        upper=np.array([102.0, 45.0, 45.0, 45.0, 45.0]),
        n_constraints=6,
        raw=_himmelblau_raw,
        known_best=KnownBest(
            position=np.array([78.0, 33.0, 29.995256025682, 45.0, 36.775812905788]),
            objective=-30665.538671783,
            provenance="[literature] classic optimum of the standard formulation",
        ),
    )


# ----------------------------------------------------------------------
# Case: three-bar planar truss sizing (2 variables, 3 stress constraints).
# Volume (2*sqrt(2)*x1 + x2) * l with member stress limits.
# ----------------------------------------------------------------------

_TRUSS_L = 100.0
_TRUSS_P = 2.0
_TRUSS_SIGMA = 2.0


def _three_bar_truss_raw(x, g):
    x1 = x[0]
    x2 = x[1]
    sq2 = math.sqrt(2.0)
    obj = (2.0 * sq2 * x1 + x2) * _TRUSS_L
    den = sq2 * x1 * x1 + 2.0 * x1 * x2
    g[0] = (sq2 * x1 + x2) / den * _TRUSS_P - _TRUSS_SIGMA
    g[1] = x2 / den * _TRUSS_P - _TRUSS_SIGMA
    g[2] = _TRUSS_P / (x1 + sq2 * x2) - _TRUSS_SIGMA
    return obj


def three_bar_truss() -> Problem:
    """Three-bar truss volume minimization under member stress limits.

    The textbook statement allows x_i = 0, which makes the stress terms
    singular; the lower bound is raised to 1e-6 to keep every evaluation
    finite on the box.
    """
    return Problem(
        name="three_bar_truss",
        dimension=2,
        lower=np.array([1e-6, 1e-6]),
        upper=np.array([1.0, 1.0]),
        n_constraints=3,
        raw=_three_bar_truss_raw,
        known_best=KnownBest(
            position=np.array([0.78863, 0.40838]),
            objective=263.896248,
            provenance="[paper-quoted] best reported design",
        ),
    )


# ----------------------------------------------------------------------
# Case: speed reducer (Golinski) weight minimization, 7 variables.
# Standard 11-constraint formulation; a reduced 9-constraint variant
# (dropping the two shaft-length conditions) is available for comparison.
# ----------------------------------------------------------------------

def _speed_reducer_raw(x, g):
    x1, x2, x3 = x[0], x[1], x[2]
    x4, x5, x6, x7 = x[3], x[4], x[5], x[6]
    g[0] = 27.0 / (x1 * x2 * x2 * x3) - 1.0
    g[1] = 397.5 / (x1 * x2 * x2 * x3 * x3) - 1.0
    g[2] = 1.93 * x4 ** 3 / (x2 * x3 * x6 ** 4) - 1.0
    g[3] = 1.93 * x5 ** 3 / (x2 * x3 * x7 ** 4) - 1.0
    g[4] = math.sqrt((745.0 * x4 / (x2 * x3)) ** 2 + 16.9e6) / (110.0 * x6 ** 3) - 1.0
    g[5] = math.sqrt((745.0 * x5 / (x2 * x3)) ** 2 + 157.5e6) / (85.0 * x7 ** 3) - 1.0
    g[6] = x2 * x3 / 40.0 - 1.0
    g[7] = 5.0 * x2 / x1 - 1.0
    g[8] = x1 / (12.0 * x2) - 1.0
    g[9] = (1.5 * x6 + 1.9) / x4 - 1.0
    g[10] = (1.1 * x7 + 1.9) / x5 - 1.0
    return (
        0.7854 * x1 * x2 * x2 * (3.3333 * x3 * x3 + 14.9334 * x3 - 43.0934)
        - 1.508 * x1 * (x6 * x6 + x7 * x7)
        + 7.477 * (x6 ** 3 + x7 ** 3)
        + 0.7854 * (x4 * x6 * x6 + x5 * x7 * x7)
    )


def _speed_reducer_raw9(x, g):
    x1, x2, x3 = x[0], x[1], x[2]
    x4, x5, x6, x7 = x[3], x[4], x[5], x[6]
    g[0] = 27.0 / (x1 * x2 * x2 * x3) - 1.0
    g[1] = 397.5 / (x1 * x2 * x2 * x3 * x3) - 1.0
    g[2] = 1.93 * x4 ** 3 / (x2 * x3 * x6 ** 4) - 1.0
    g[3] = 1.93 * x5 ** 3 / (x2 * x3 * x7 ** 4) - 1.0
    g[4] = math.sqrt((745.0 * x4 / (x2 * x3)) ** 2 + 16.9e6) / (110.0 * x6 ** 3) - 1.0
    g[5] = math.sqrt((745.0 * x5 / (x2 * x3)) ** 2 + 157.5e6) / (85.0 * x7 ** 3) - 1.0
    g[6] = x2 * x3 / 40.0 - 1.0
    g[7] = 5.0 * x2 / x1 - 1.0
    g[8] = x1 / (12.0 * x2) - 1.0
    return (
        0.7854 * x1 * x2 * x2 * (3.3333 * x3 * x3 + 14.9334 * x3 - 43.0934)
        - 1.508 * x1 * (x6 * x6 + x7 * x7)
        + 7.477 * (x6 ** 3 + x7 ** 3)
        + 0.7854 * (x4 * x6 * x6 + x5 * x7 * x7)
    )


_SPEED_REDUCER_BOUNDS = (
    np.array([2.6, 0.7, 17.0, 7.3, 7.3, 2.9, 5.0]),
    np.array([3.6, 0.8, 28.0, 8.3, 8.3, 3.9, 5.5]),
)


def speed_reducer(constraint_set: str = "standard") -> Problem:
    """Speed reducer weight minimization.

    ``constraint_set="standard"`` ships the full 11-constraint form solved
    throughout the comparison literature; ``"nine"`` keeps only the first
    nine (dropping the two shaft-length conditions).
    """
    if constraint_set == "standard":
        raw, m, name = _speed_reducer_raw, 11, "speed_reducer"
    elif constraint_set == "nine":
        raw, m, name = _speed_reducer_raw9, 9, "speed_reducer_9"
    else:
        raise ValueError(f"constraint_set must be 'standard' or 'nine', got {constraint_set!r}")
    return Problem(
        name=name,
        dimension=7,
        lower=_SPEED_REDUCER_BOUNDS[0].copy(),
        upper=_SPEED_REDUCER_BOUNDS[1].copy(),
        n_constraints=m,
        raw=raw,
        known_best=KnownBest(
            position=np.array([3.5, 0.7, 17.0, 7.3, 7.715319911, 3.350214666, 5.286654465]),
            objective=2994.341316,
            provenance="[literature] standard optimal design; objective as evaluated here",
        ),
    )


# ----------------------------------------------------------------------
# Case: five-step cantilever beam volume minimization, 10 variables
# (widths x1..x5, heights x6..x10). Five bending-stress limits, one tip
# deflection limit, five aspect-ratio limits. Segment length 100 cm.
# ----------------------------------------------------------------------

_CANT_P = 50000.0
_CANT_E = 2.0e7
_CANT_SEG = 100.0


def _cantilever_raw(x, g):
    obj = 0.0
    for i in range(5):
        obj += x[i] * x[i + 5] * _CANT_SEG
    # bending stress, tip segment first (moment arm grows toward root)
    g[0] = 600.0 * _CANT_P / (x[4] * x[9] * x[9]) - 14000.0
    g[1] = 6.0 * _CANT_P * 200.0 / (x[3] * x[8] * x[8]) - 14000.0
    g[2] = 6.0 * _CANT_P * 300.0 / (x[2] * x[7] * x[7]) - 14000.0
    g[3] = 6.0 * _CANT_P * 400.0 / (x[1] * x[6] * x[6]) - 14000.0
    g[4] = 6.0 * _CANT_P * 500.0 / (x[0] * x[5] * x[5]) - 14000.0
    # tip deflection with rectangular I_i = x_i * x_{i+5}^3 / 12
    i1 = x[0] * x[5] ** 3 / 12.0
    i2 = x[1] * x[6] ** 3 / 12.0
    i3 = x[2] * x[7] ** 3 / 12.0
    i4 = x[3] * x[8] ** 3 / 12.0
    i5 = x[4] * x[9] ** 3 / 12.0
    g[5] = (
        _CANT_P * _CANT_SEG ** 3 / (3.0 * _CANT_E)
        * (1.0 / i5 + 7.0 / i4 + 19.0 / i3 + 37.0 / i2 + 61.0 / i1)
        - 2.7
    )
    g[6] = x[9] / x[4] - 20.0
    g[7] = x[8] / x[3] - 20.0
    g[8] = x[7] / x[2] - 20.0
    g[9] = x[6] / x[1] - 20.0
    g[10] = x[5] / x[0] - 20.0
    return obj


def cantilever_beam() -> Problem:
    """Stepped cantilever beam volume minimization (10 variables, 11 constraints)."""
    return Problem(
        name="cantilever_beam",
        dimension=10,
        lower=np.concatenate([np.full(5, 1.0), np.full(5, 30.0)]),
        upper=np.concatenate([np.full(5, 5.0), np.full(5, 65.0)]),
        n_constraints=11,
        raw=_cantilever_raw,
    )


# ----------------------------------------------------------------------
# Case: heat exchanger network design, 8 variables, 6 constraints
# (three linear, three nonlinear heat-balance conditions). All six
# constraints are binding at the optimum.
# ----------------------------------------------------------------------

def _heat_exchanger_raw(x, g):
    x1, x2, x3, x4 = x[0], x[1], x[2], x[3]
    x5, x6, x7, x8 = x[4], x[5], x[6], x[7]
    g[0] = 0.0025 * (x4 + x6) - 1.0
    g[1] = 0.0025 * (x5 + x7 - x4) - 1.0
    g[2] = 0.01 * (x8 - x5) - 1.0
    g[3] = 100.0 * x1 - x1 * x6 + 833.33252 * x4 - 83333.333
    g[4] = x2 * x4 - x2 * x7 - 1250.0 * x4 + 1250.0 * x5
    g[5] = x3 * x5 - x3 * x8 - 2500.0 * x5 + 1250000.0
    return x1 + x2 + x3


def heat_exchanger() -> Problem:
    """Heat exchanger area minimization (8 variables, 6 constraints)."""
    return Problem(
        name="heat_exchanger",
        dimension=8,
        lower=np.array([100.0, 1000.0, 1000.0, 10.0, 10.0, 10.0, 10.0, 10.0]),
        upper=np.array([10000.0, 10000.0, 10000.0, 1000.0, 1000.0, 1000.0, 1000.0, 1000.0]),
        n_constraints=6,
        raw=_heat_exchanger_raw,
        known_best=KnownBest(
            position=np.array(
                [579.30675, 1359.97076, 5109.97052, 182.01770,
                 295.60118, 217.98230, 286.41653, 395.60118]
            ),
            objective=7049.2480,
            provenance="[paper-quoted] best reported design",
        ),
    )


# ----------------------------------------------------------------------
# Case: car side impact crashworthiness design, 11 variables, 10 response
# constraints. Objective and responses are the published quadratic
# response surfaces of the EEVC side-impact model; x8 and x9 are material
# choices restricted to {0.192, 0.345}.
# ----------------------------------------------------------------------

def _car_side_raw(x, g):
    x1, x2, x3, x4 = x[0], x[1], x[2], x[3]
    x5, x6, x7, x8 = x[4], x[5], x[6], x[7]
    x9, x10, x11 = x[8], x[9], x[10]
    weight = (
        1.98 + 4.90 * x1 + 6.67 * x2 + 6.98 * x3
        + 4.01 * x4 + 1.78 * x5 + 2.73 * x7
    )
    # abdomen load (kN) <= 1
    f_a = 1.16 - 0.3717 * x2 * x4 - 0.00931 * x2 * x10 - 0.484 * x3 * x9 + 0.01343 * x6 * x10
    # viscous criteria (m/s) <= 0.32
    vc_u = (
        0.261 - 0.0159 * x1 * x2 - 0.188 * x1 * x8 - 0.019 * x2 * x7
        + 0.0144 * x3 * x5 + 0.0008757 * x5 * x10 + 0.08045 * x6 * x9
        + 0.00139 * x8 * x11 + 0.00001575 * x10 * x11
    )
    vc_m = (
        0.214 + 0.00817 * x5 - 0.131 * x1 * x8 - 0.0704 * x1 * x9
        + 0.03099 * x2 * x6 - 0.018 * x2 * x7 + 0.0208 * x3 * x8
        + 0.121 * x3 * x9 - 0.00364 * x5 * x6 + 0.0007715 * x5 * x10
        - 0.0005354 * x6 * x10 + 0.00121 * x8 * x11 + 0.00184 * x9 * x10
        - 0.018 * x2 * x2
    )
    vc_l = 0.74 - 0.61 * x2 - 0.163 * x3 * x8 + 0.001232 * x3 * x10 - 0.166 * x7 * x9 + 0.227 * x2 * x2
    # rib deflections (mm) <= 32
    d_ur = 28.98 + 3.818 * x3 - 4.2 * x1 * x2 + 0.0207 * x5 * x10 + 6.63 * x6 * x9 - 7.7 * x7 * x8 + 0.32 * x9 * x10
    d_mr = (
        33.86 + 2.95 * x3 + 0.1792 * x10 - 5.057 * x1 * x2 - 11.0 * x2 * x8
        - 0.0215 * x5 * x10 - 9.98 * x7 * x8 + 22.0 * x8 * x9
    )
    d_lr = 46.36 - 9.9 * x2 - 12.9 * x1 * x8 + 0.1107 * x3 * x10
    # pubic force (kN) <= 4
    f_p = 4.72 - 0.5 * x4 - 0.19 * x2 * x3 - 0.0122 * x4 * x10 + 0.009325 * x6 * x10 + 0.000191 * x11 * x11
    # velocity of B-pillar midpoint (mm/ms) <= 9.9
    v_mbp = 10.58 - 0.674 * x1 * x2 - 1.95 * x2 * x8 + 0.02054 * x3 * x10 - 0.0198 * x4 * x10 + 0.028 * x6 * x10
    # velocity of front door at B-pillar (mm/ms) <= 15.7
    v_fd = 16.45 - 0.489 * x3 * x7 - 0.843 * x5 * x6 + 0.0432 * x9 * x10 - 0.0556 * x9 * x11 - 0.000786 * x11 * x11
    g[0] = f_a - 1.0
    g[1] = vc_u - 0.32
    g[2] = vc_m - 0.32
    g[3] = vc_l - 0.32
    g[4] = d_ur - 32.0
    g[5] = d_mr - 32.0
    g[6] = d_lr - 32.0
    g[7] = f_p - 4.0
    g[8] = v_mbp - 9.9
    g[9] = v_fd - 15.7
    return weight


def car_side_impact() -> Problem:
    """Car side impact weight minimization (11 variables, 10 constraints).

    x8 and x9 select materials and only take the values 0.192 or 0.345;
    optimizers reach them through the discrete snap operator.
    """
    material = np.array([0.192, 0.345])
    return Problem(
        name="car_side_impact",
        dimension=11,
        lower=np.array([0.5, 0.45, 0.5, 0.5, 0.875, 0.4, 0.4, 0.192, 0.192, 0.5, 0.5]),
        upper=np.array([1.5, 1.35, 1.5, 1.5, 2.625, 1.2, 1.2, 0.345, 0.345, 1.5, 1.5]),
        n_constraints=10,
        raw=_car_side_raw,
        discrete_sets={7: material, 8: material},
    )


# ----------------------------------------------------------------------
# Registry
# ----------------------------------------------------------------------

_FACTORIES: dict[str, Callable[[], Problem]] = {
    "mathematical_12": lambda: mathematical_problem(12),
    "mathematical_60": lambda: mathematical_problem(60),
    "himmelblau": himmelblau,
    "three_bar_truss": three_bar_truss,
    "speed_reducer": speed_reducer,
    "speed_reducer_9": lambda: speed_reducer("nine"),
    "cantilever_beam": cantilever_beam,
    "heat_exchanger": heat_exchanger,
    "car_side_impact": car_side_impact,
}

_CACHE: dict[str, Problem] = {}


def register_problem(name: str, factory: Callable[[], Problem]) -> None:
    """Register an additional problem factory under a stable name."""
    _FACTORIES[name] = factory


def list_problems() -> list[str]:
    return sorted(_FACTORIES)


def registry_lookup(name: str) -> Problem:
    """Return the problem registered under ``name``."""
    if name not in _FACTORIES:
        raise KeyError(
            f"unknown problem {name!r}; available: {', '.join(list_problems())}"
        )
    if name not in _CACHE:
        _CACHE[name] = _FACTORIES[name]()
    return _CACHE[name]
