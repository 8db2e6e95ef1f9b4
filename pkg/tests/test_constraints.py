import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from batbench.constraints import (
    ConstraintHandler,
    EvaluatedPoint,
    clamp_to_bounds,
    compare,
    normalize_constraints,
    snap_discrete,
)
from batbench.problems import himmelblau, mathematical_problem


def pt(objective, violations):
    violations = np.asarray(violations, dtype=float)
    return EvaluatedPoint(position=np.zeros(1), objective=objective, violations=violations)


def test_total_violation_and_feasibility():
    handler = ConstraintHandler()
    p = pt(1.0, [0.0, 0.5, 0.25])
    assert p.total_violation == 0.75
    assert not handler.is_feasible(p)
    assert handler.is_feasible(pt(1.0, [0.0, 0.0]))
    assert handler.is_feasible(pt(1.0, []))


def test_feasible_beats_infeasible():
    handler = ConstraintHandler()
    feasible = pt(10.0, [0.0])
    infeasible = pt(-100.0, [5.0])
    assert compare(feasible, infeasible, handler) == -1
    assert handler.better(feasible, infeasible)


def test_two_feasible_by_objective():
    handler = ConstraintHandler()
    assert compare(pt(1.0, [0.0]), pt(2.0, [0.0]), handler) == -1
    assert compare(pt(2.0, [0.0]), pt(1.0, [0.0]), handler) == 1
    assert compare(pt(1.0, [0.0]), pt(1.0, [0.0]), handler) == 0


def test_two_infeasible_by_total_violation_then_objective():
    handler = ConstraintHandler()
    assert compare(pt(5.0, [1.0]), pt(0.0, [2.0]), handler) == -1
    assert compare(pt(1.0, [2.0]), pt(5.0, [2.0]), handler) == -1


def test_penalty_mode_comparison():
    handler = ConstraintHandler(mode="static_penalty", penalty_coefficient=1e6)
    # violation of 1 at coefficient 1e6 dwarfs an objective gap of 100
    assert compare(pt(100.0, [0.0]), pt(0.0, [1.0]), handler) == -1


def test_handler_validation():
    with pytest.raises(ValueError):
        ConstraintHandler(mode="nope")
    with pytest.raises(ValueError):
        ConstraintHandler(penalty_coefficient=0.0)
    with pytest.raises(ValueError):
        ConstraintHandler(tolerance=-1.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(0, 10), st.floats(0, 10)),
                min_size=3, max_size=3),
       st.sampled_from(["feasibility_first", "static_penalty"]))
def test_compare_transitive_total(triple, mode):
    handler = ConstraintHandler(mode=mode)
    a, b, c = [pt(f, [v1, v2]) for f, v1, v2 in triple]
    # totality: every pair is ordered
    for x, y in ((a, b), (b, c), (a, c)):
        assert compare(x, y, handler) == -compare(y, x, handler)
    # transitivity of (strictly better or tied)
    if compare(a, b, handler) <= 0 and compare(b, c, handler) <= 0:
        assert compare(a, c, handler) <= 0


def test_clamp_inside_is_identity():
    lo, hi = np.zeros(3), np.ones(3)
    x = np.array([0.2, 0.5, 0.9])
    assert np.array_equal(clamp_to_bounds(x, lo, hi), x)


def test_clamp_examples_and_idempotence():
    lo = np.array([78.0, 33.0])
    hi = np.array([102.0, 45.0])
    x = np.array([200.0, 10.0])
    c = clamp_to_bounds(x, lo, hi)
    assert np.array_equal(c, [102.0, 33.0])
    assert np.array_equal(clamp_to_bounds(c, lo, hi), c)


def test_clamp_rejects_malformed_bounds():
    with pytest.raises(ValueError):
        clamp_to_bounds(np.zeros(2), np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        clamp_to_bounds(np.zeros(2), np.zeros(3), np.ones(3))


def test_snap_discrete_nearest_and_tie_break():
    sets = {0: np.array([0.192, 0.345])}
    assert snap_discrete(np.array([0.2]), sets)[0] == 0.192
    assert snap_discrete(np.array([0.3]), sets)[0] == 0.345
    # exact midpoint ties to the smaller value
    assert snap_discrete(np.array([0.2685]), sets)[0] == 0.192


def test_snap_discrete_leaves_continuous_untouched():
    sets = {1: np.array([1.0, 2.0])}
    out = snap_discrete(np.array([0.37, 1.4, 5.5]), sets)
    assert out[0] == 0.37 and out[2] == 5.5
    assert out[1] == 1.0


def test_snap_discrete_projection_idempotent():
    sets = {0: np.array([0.192, 0.345]), 2: np.array([1.0, 2.0, 3.0])}
    x = np.array([0.25, 7.0, 2.6])
    once = snap_discrete(x, sets)
    assert np.array_equal(snap_discrete(once, sets), once)
    assert once[0] in sets[0] and once[2] in sets[2]


def test_snap_discrete_empty_set_errors():
    with pytest.raises(ValueError):
        snap_discrete(np.array([1.0]), {0: np.array([])})


def test_normalize_constraints_counts_and_sign():
    problem = mathematical_problem(12)
    x = np.full(12, 1.0)
    v = normalize_constraints(problem, x)
    assert v.shape == (6,)
    assert np.all(v >= 0.0)
    # weighted block sum is 10, violating the lower limit 0 <= g by 10
    assert v[0] == pytest.approx(10.0)
    assert v[1] == 0.0


def test_normalize_constraints_boundary_is_zero():
    problem = mathematical_problem(4)
    # block sum exactly 20 puts g on its lower bound: zero violation
    x = np.array([2.0, 3.0, 4.0, 0.0])
    g1 = x[0] + 2 * x[1] + 3 * x[2] + 4 * x[3] - 20.0
    assert g1 == 0.0
    v = normalize_constraints(problem, x)
    assert v[0] == 0.0 and v[1] == 0.0


def test_normalize_constraints_himmelblau_expansion_order():
    problem = himmelblau()
    x = np.array([78.0, 33.0, 27.0, 27.0, 27.0])
    g = problem.constraint_values(x)
    # entries are (0-g1, g1-92, 90-g2, g2-110, 20-g3, g3-25)
    g1 = -g[0]
    assert g[1] == pytest.approx(g1 - 92.0)
    v = normalize_constraints(problem, x)
    # only the 20 <= g3 side is violated at this corner
    assert np.count_nonzero(v) == 1
    assert v[4] == pytest.approx(3.2371489, abs=1e-6)
