"""Compiled execution lane for the bat-algorithm engine.

The whole run loop (initialization, per-bat updates, constraint
bookkeeping, trace recording) is one numba kernel that receives the
problem's compiled raw evaluator as a first-class function argument. The
kernel consumes the run's ``np.random.Generator`` directly, drawing in
exactly the same order as the interpreted engine in ``engine.py``, so a
given seed follows the same trajectory on either lane.

Set the environment variable ``BATBENCH_DISABLE_NUMBA=1`` to force the
pure-numpy fallback everywhere; ``batbench bench`` compares the two lanes.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn


__all__ = ["NUMBA_AVAILABLE", "compile_raw", "run_compiled"]

_RAW_CACHE: dict[int, object] = {}


def compile_raw(raw):
    """Compile a problem's raw evaluator, memoized on function identity."""
    if not NUMBA_AVAILABLE:
        return None
    key = id(raw)
    if key not in _RAW_CACHE:
        _RAW_CACHE[key] = njit(raw)
    return _RAW_CACHE[key]


@njit(cache=False)
def _is_better(obj_a, tv_a, fe_a, obj_b, tv_b, fe_b, feas_first, pen):
    if not feas_first:
        return obj_a + pen * tv_a < obj_b + pen * tv_b
    if fe_a != fe_b:
        return fe_a
    if fe_a:
        return obj_a < obj_b
    if tv_a != tv_b:
        return tv_a < tv_b
    return obj_a < obj_b


@njit(cache=False)
def _to_x_snap(z, lo, width, disc_idx, disc_count, disc_vals, x):
    """Map z to problem units into x, snapping discrete coordinates and
    writing the matching z back (nearest value, ties to the smaller)."""
    d = z.size
    for k in range(d):
        x[k] = lo[k] + z[k] * width[k]
    for j in range(disc_idx.size):
        k = disc_idx[j]
        best = disc_vals[j, 0]
        best_dist = abs(x[k] - best)
        for c in range(1, disc_count[j]):
            v = disc_vals[j, c]
            dist = abs(x[k] - v)
            if dist < best_dist:
                best = v
                best_dist = dist
        x[k] = best
        if width[k] > 0.0:
            z[k] = (x[k] - lo[k]) / width[k]
        else:
            z[k] = 0.0


@njit(cache=False)
def _ba_kernel(raw, lo, width, m,
               disc_idx, disc_count, disc_vals,
               n, iters, fmin, fmax, alpha, gamma,
               llo, lhi, plo, phi,
               clock_iteration, always_accept, freeze, has_override, override,
               feas_first, pen, tol, gen):
    d = lo.size
    z = np.empty((n, d))
    vel = np.zeros((n, d))
    loud = np.empty(n)
    pulse0 = np.empty(n)
    pulse = np.zeros(n)
    acc = np.zeros(n, dtype=np.int64)
    bobj = np.empty(n)
    bviol = np.empty((n, m))
    btv = np.empty(n)
    bfe = np.zeros(n, dtype=np.bool_)
    x = np.empty(d)
    gbuf = np.empty(m)
    cand = np.empty(d)
    walks = 0
    evals = 0

    for i in range(n):
        for k in range(d):
            z[i, k] = gen.random()
        _ = fmin + (fmax - fmin) * gen.random()  # initial frequency draw
        loud[i] = llo + (lhi - llo) * gen.random()
        pulse0[i] = plo + (phi - plo) * gen.random()
        if has_override:
            pulse[i] = override
        _to_x_snap(z[i], lo, width, disc_idx, disc_count, disc_vals, x)
        obj = raw(x, gbuf)
        evals += 1
        tv = 0.0
        mx = 0.0
        for k in range(m):
            v = gbuf[k] if gbuf[k] > 0.0 else 0.0
            bviol[i, k] = v
            tv += v
            if v > mx:
                mx = v
        bobj[i] = obj
        btv[i] = tv
        bfe[i] = mx <= tol

    bi = 0
    for i in range(1, n):
        if _is_better(bobj[i], btv[i], bfe[i], bobj[bi], btv[bi], bfe[bi], feas_first, pen):
            bi = i
    gb_z = z[bi].copy()
    gb_obj = bobj[bi]
    gb_viol = bviol[bi].copy()
    gb_tv = btv[bi]
    gb_fe = bfe[bi]

    trace = np.empty(iters + 1)
    trace[0] = gb_obj

    for t in range(1, iters + 1):
        s = 0.0
        for i in range(n):
            s += loud[i]
        mean_loud = s / n
        for i in range(n):
            beta = gen.random()
            f = fmin + (fmax - fmin) * beta
            for k in range(d):
                vel[i, k] = vel[i, k] + (z[i, k] - gb_z[k]) * f
                cand[k] = z[i, k] + vel[i, k]
            gate = gen.random()
            if gate > pulse[i]:
                walks += 1
                if mean_loud > 0.0:
                    for k in range(d):
                        eps = -1.0 + 2.0 * gen.random()
                        cand[k] = gb_z[k] + eps * mean_loud
                else:
                    for k in range(d):
                        cand[k] = gb_z[k]
            for k in range(d):
                if cand[k] < 0.0:
                    cand[k] = 0.0
                elif cand[k] > 1.0:
                    cand[k] = 1.0
            _to_x_snap(cand, lo, width, disc_idx, disc_count, disc_vals, x)
            obj = raw(x, gbuf)
            evals += 1
            tv = 0.0
            mx = 0.0
            for k in range(m):
                v = gbuf[k] if gbuf[k] > 0.0 else 0.0
                gbuf[k] = v
                tv += v
                if v > mx:
                    mx = v
            fe = mx <= tol
            accept_draw = gen.random()
            if always_accept:
                accepted = True
            else:
                accepted = accept_draw < loud[i] and _is_better(
                    obj, tv, fe, bobj[i], btv[i], bfe[i], feas_first, pen)
            if accepted:
                for k in range(d):
                    z[i, k] = cand[k]
                for k in range(m):
                    bviol[i, k] = gbuf[k]
                bobj[i] = obj
                btv[i] = tv
                bfe[i] = fe
                acc[i] += 1
                if not freeze:
                    if loud[i] > 0.0:
                        loud[i] = alpha * loud[i]
                    if not has_override:
                        clock = t if clock_iteration else acc[i]
                        pulse[i] = pulse0[i] * (1.0 - np.exp(-gamma * clock))
            if _is_better(obj, tv, fe, gb_obj, gb_tv, gb_fe, feas_first, pen):
                for k in range(d):
                    gb_z[k] = cand[k]
                for k in range(m):
                    gb_viol[k] = gbuf[k]
                gb_obj = obj
                gb_tv = tv
                gb_fe = fe
        trace[t] = gb_obj

    return gb_z, gb_obj, gb_viol, trace, evals, walks


def _discrete_arrays(problem):
    sets = problem.discrete_sets
    if not sets:
        return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
                np.empty((0, 1)))
    idx = np.array(sorted(sets), dtype=np.int64)
    counts = np.array([sets[int(k)].size for k in idx], dtype=np.int64)
    vals = np.zeros((idx.size, int(counts.max())))
    for j, k in enumerate(idx):
        vals[j, : counts[j]] = sets[int(k)]
    return idx, counts, vals


def run_compiled(problem, config, handler):
    """Execute a full run on the compiled lane and wrap the result."""
    from .constraints import EvaluatedPoint, snap_discrete
    from .engine import OptimizationResult
    from .rng import RandomStream

    raw_c = problem.compiled_raw()
    if raw_c is None:
        raise RuntimeError("numba is not available; run with use_numba=False")
    disc_idx, disc_count, disc_vals = _discrete_arrays(problem)
    stream = RandomStream(config.seed)
    lo = problem.lower
    width = problem.upper - problem.lower
    gb_z, gb_obj, gb_viol, trace, evals, walks = _ba_kernel(
        raw_c, lo, width, problem.n_constraints,
        disc_idx, disc_count, disc_vals,
        config.n_bats, config.max_iterations,
        config.f_min, config.f_max, config.alpha, config.gamma,
        config.loudness_init_range[0], config.loudness_init_range[1],
        config.pulse_init_range[0], config.pulse_init_range[1],
        config.pulse_clock == "iteration",
        config.always_accept, config.freeze_schedules,
        config.pulse_rate_override is not None,
        0.0 if config.pulse_rate_override is None else float(config.pulse_rate_override),
        handler.mode == "feasibility_first",
        handler.penalty_coefficient, handler.tolerance,
        stream.generator,
    )
    x = lo + gb_z * width
    if problem.discrete_sets:
        x = snap_discrete(x, problem.discrete_sets)
    best = EvaluatedPoint(position=x, objective=float(gb_obj), violations=gb_viol)
    return OptimizationResult(
        problem_name=problem.name,
        best=best,
        objective_trace=trace,
        evaluation_count=int(evals),
        iterations=config.max_iterations,
        local_walk_count=int(walks),
        seed=config.seed,
        lane="numba",
    )
