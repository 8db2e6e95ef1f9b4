"""Constraint handling: evaluated points, comparison rules, repair operators.

Constrained problems expose their inequality constraints in the one-sided
form g(x) <= 0 (double-sided limits are expanded at problem construction).
This module turns raw constraint values into violation vectors and defines
the total preorder used by every optimizer to compare candidate points:
either feasibility-first rules or a static penalty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EvaluatedPoint",
    "ConstraintHandler",
    "compare",
    "clamp_to_bounds",
    "snap_discrete",
    "normalize_constraints",
]

HANDLER_MODES = ("feasibility_first", "static_penalty")


@dataclass(frozen=True, eq=False)
class EvaluatedPoint:
    """A position together with its objective value and constraint violations.

    ``violations[k] = max(0, g_k(position))`` for one-sided constraints
    g_k <= 0, so the point is feasible exactly when the vector is zero.
    """

    position: np.ndarray
    objective: float
    violations: np.ndarray

    @property
    def total_violation(self) -> float:
        return float(np.sum(self.violations))

    def __repr__(self) -> str:
        return (
            f"EvaluatedPoint(objective={self.objective:.6g}, "
            f"total_violation={self.total_violation:.3g}, d={self.position.size})"
        )


@dataclass(frozen=True)
class ConstraintHandler:
    """Comparison rule for constrained minimization.

    feasibility_first: any feasible point beats any infeasible one; two
    feasible points compare by objective; two infeasible points compare by
    total violation with objective as tie-break.

    static_penalty: points compare by objective + penalty_coefficient *
    total_violation.

    A point counts as feasible when every violation entry is at most
    ``tolerance``.
    """

    mode: str = "feasibility_first"
    penalty_coefficient: float = 1e6
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.mode not in HANDLER_MODES:
            raise ValueError(f"mode must be one of {HANDLER_MODES}, got {self.mode!r}")
        if self.penalty_coefficient <= 0:
            raise ValueError("penalty_coefficient must be > 0")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")

    def is_feasible(self, point: EvaluatedPoint) -> bool:
        if point.violations.size == 0:
            return True
        return bool(np.max(point.violations) <= self.tolerance)

    def penalized_objective(self, point: EvaluatedPoint) -> float:
        return point.objective + self.penalty_coefficient * point.total_violation

    def better(self, a: EvaluatedPoint, b: EvaluatedPoint) -> bool:
        """True when a is strictly preferred over b."""
        return compare(a, b, self) < 0


def compare(a: EvaluatedPoint, b: EvaluatedPoint, handler: ConstraintHandler) -> int:
    """Order two evaluated points: -1 if a is better, 1 if b is, 0 on ties."""
    if handler.mode == "static_penalty":
        pa = handler.penalized_objective(a)
        pb = handler.penalized_objective(b)
        return -1 if pa < pb else (1 if pa > pb else 0)
    fa, fb = handler.is_feasible(a), handler.is_feasible(b)
    if fa != fb:
        return -1 if fa else 1
    if fa:
        return -1 if a.objective < b.objective else (1 if a.objective > b.objective else 0)
    va, vb = a.total_violation, b.total_violation
    if va != vb:
        return -1 if va < vb else 1
    return -1 if a.objective < b.objective else (1 if a.objective > b.objective else 0)


def clamp_to_bounds(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Componentwise median(lo, x, hi). Idempotent."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    x = np.asarray(x, dtype=float)
    if lo.shape != x.shape or hi.shape != x.shape:
        raise ValueError(f"shape mismatch: x {x.shape}, lo {lo.shape}, hi {hi.shape}")
    if np.any(lo > hi):
        raise ValueError("malformed bounds: lo > hi in some coordinate")
    return np.minimum(np.maximum(x, lo), hi)


def snap_discrete(x: np.ndarray, discrete_sets) -> np.ndarray:
    """Project discrete-valued coordinates onto their nearest allowed value.

    ``discrete_sets`` maps coordinate index to a sorted array of allowed
    values. Ties snap to the smaller value. Continuous coordinates pass
    through untouched. Apply after clamping, before evaluation.
    """
    out = np.array(x, dtype=float, copy=True)
    if not discrete_sets:
        return out
    for idx, values in discrete_sets.items():
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError(f"empty discrete set for coordinate {idx}")
        best = values[0]
        best_dist = abs(out[idx] - values[0])
        for v in values[1:]:
            dist = abs(out[idx] - v)
            if dist < best_dist:
                best = v
                best_dist = dist
        out[idx] = best
    return out


def normalize_constraints(problem, x: np.ndarray) -> np.ndarray:
    """Violation vector of ``problem`` at x.

    The problem's constraints are already expanded to one-sided form
    (L <= g <= U becomes L - g <= 0 and g - U <= 0), so the violation on
    each entry is simply max(0, g_k(x)).
    """
    return np.maximum(problem.constraint_values(x), 0.0)
