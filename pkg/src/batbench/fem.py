"""Planar-frame finite elements and strain-based parameter identification.

A small linear-static FEM (2-D frame elements: axial bar plus
Euler-Bernoulli bending, six DOFs per element) produces analytical strains
at gauge locations. The identification benchmark treats the member moments
of inertia as unknowns and minimizes the summed absolute relative residual
between measured and analytical gauge strains over all load cases.
Measured strains are synthesized by the same forward model at the true
parameters, so the optimum value is exactly zero.

Geometry is data, not code: the shipped benchmark lives in
``data/frame_benchmark.json`` (nodes, elements with area and parameter
index, fixed nodes, single-force load cases, gauges). Node, DOF, element
and parameter indices in the file are 1-based; all computation runs in N
and cm (the elastic modulus is converted from GPa).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .problems import Problem, KnownBest, register_problem

__all__ = [
    "FrameModel",
    "IdentificationProblem",
    "load_frame",
    "assemble_stiffness",
    "solve_displacements",
    "solve_strains",
    "identification_objective",
    "build_benchmark",
    "make_identification_problem",
]

GPA_TO_N_PER_CM2 = 1e5


@dataclass(eq=False)
class FrameModel:
    """Immutable planar frame: geometry, sections, supports, loads, gauges."""

    nodes: np.ndarray          # (n_nodes, 2) coordinates, cm
    conn: np.ndarray           # (n_elems, 2) 0-based node indices
    areas: np.ndarray          # (n_elems,) cm^2
    param_index: np.ndarray    # (n_elems,) 0-based unknown-inertia index
    fixed_dofs: np.ndarray     # 0-based clamped global DOFs
    elastic_modulus: float     # N/cm^2
    loads: np.ndarray          # (n_free, n_cases) load vectors on free DOFs
    gauges: list               # (element, position fraction, fiber offset cm)
    n_parameters: int
    free_dofs: np.ndarray      # 0-based global DOFs kept after supports
    _forward: Optional[object] = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.conn.shape[0]

    @property
    def n_load_cases(self) -> int:
        return self.loads.shape[1]

    @property
    def n_gauges(self) -> int:
        return len(self.gauges)

    def forward(self):
        """Cached closure mapping inertias to flat gauge strains."""
        if self._forward is None:
            self._forward = _make_forward(self)
        return self._forward


def load_frame(source) -> FrameModel:
    """Build a FrameModel from a geometry definition (path, dict or JSON str)."""
    if isinstance(source, dict):
        data = source
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        data = json.loads(source)
    else:
        with open(source) as fh:
            data = json.load(fh)

    nodes = np.asarray(data["nodes"], dtype=float)
    n_nodes = nodes.shape[0]
    conn = np.array([[e["nodes"][0] - 1, e["nodes"][1] - 1] for e in data["elements"]],
                    dtype=np.int64)
    if conn.min() < 0 or conn.max() >= n_nodes:
        raise ValueError("element connectivity references an unknown node")
    areas = np.array([e["area"] for e in data["elements"]], dtype=float)
    param_index = np.array([e["parameter"] - 1 for e in data["elements"]], dtype=np.int64)
    n_parameters = int(param_index.max()) + 1

    fixed = []
    for node in data["fixed_nodes"]:
        base = 3 * (node - 1)
        fixed.extend([base, base + 1, base + 2])
    fixed_dofs = np.array(sorted(fixed), dtype=np.int64)
    free_dofs = np.array([d for d in range(3 * n_nodes) if d not in set(fixed)],
                         dtype=np.int64)
    if free_dofs.size == 0:
        raise ValueError("all degrees of freedom are fixed")

    dof_pos = {int(d): k for k, d in enumerate(free_dofs)}
    cases = data["load_cases"]
    loads = np.zeros((free_dofs.size, len(cases)))
    for c, case in enumerate(cases):
        dof = case["dof"] - 1
        if dof not in dof_pos:
            raise ValueError(f"load case {c + 1} targets fixed or unknown DOF {case['dof']}")
        loads[dof_pos[dof], c] = case["force"]

    gauges = [(g["element"] - 1, float(g["position"]), float(g["fiber_offset"]))
              for g in data["gauges"]]
    for e, pos, _ in gauges:
        if not 0 <= e < conn.shape[0]:
            raise ValueError("gauge references an unknown element")
        if not 0.0 <= pos <= 1.0:
            raise ValueError("gauge position must lie in [0, 1] along the member")

    return FrameModel(
        nodes=nodes,
        conn=conn,
        areas=areas,
        param_index=param_index,
        fixed_dofs=fixed_dofs,
        elastic_modulus=float(data["elastic_modulus_gpa"]) * GPA_TO_N_PER_CM2,
        loads=loads,
        gauges=gauges,
        n_parameters=n_parameters,
        free_dofs=free_dofs,
    )


def _element_geometry(model: FrameModel, e: int):
    i, j = model.conn[e]
    xi, yi = model.nodes[i]
    xj, yj = model.nodes[j]
    length = float(np.hypot(xj - xi, yj - yi))
    return (xj - xi) / length, (yj - yi) / length, length


def _element_k_global(model: FrameModel, e: int, inertia: float) -> np.ndarray:
    c, s, L = _element_geometry(model, e)
    ea = model.elastic_modulus * model.areas[e]
    ei = model.elastic_modulus * inertia
    k = np.array([
        [ea / L, 0.0, 0.0, -ea / L, 0.0, 0.0],
        [0.0, 12 * ei / L**3, 6 * ei / L**2, 0.0, -12 * ei / L**3, 6 * ei / L**2],
        [0.0, 6 * ei / L**2, 4 * ei / L, 0.0, -6 * ei / L**2, 2 * ei / L],
        [-ea / L, 0.0, 0.0, ea / L, 0.0, 0.0],
        [0.0, -12 * ei / L**3, -6 * ei / L**2, 0.0, 12 * ei / L**3, -6 * ei / L**2],
        [0.0, 6 * ei / L**2, 2 * ei / L, 0.0, -6 * ei / L**2, 4 * ei / L],
    ])
    t = np.zeros((6, 6))
    t[0, 0] = c; t[0, 1] = s
    t[1, 0] = -s; t[1, 1] = c
    t[2, 2] = 1.0
    t[3, 3] = c; t[3, 4] = s
    t[4, 3] = -s; t[4, 4] = c
    t[5, 5] = 1.0
    return t.T @ k @ t


def assemble_stiffness(model: FrameModel, inertias: np.ndarray) -> np.ndarray:
    """Global stiffness on the free DOFs. Symmetric by construction."""
    inertias = np.asarray(inertias, dtype=float)
    if inertias.shape != (model.n_parameters,):
        raise ValueError(
            f"expected {model.n_parameters} inertia parameters, got shape {inertias.shape}")
    if np.any(inertias <= 0):
        raise ValueError("inertias must be positive")
    n = 3 * model.n_nodes
    k_full = np.zeros((n, n))
    for e in range(model.n_elements):
        kg = _element_k_global(model, e, inertias[model.param_index[e]])
        i, j = model.conn[e]
        dofs = [3 * i, 3 * i + 1, 3 * i + 2, 3 * j, 3 * j + 1, 3 * j + 2]
        for a in range(6):
            for b in range(6):
                k_full[dofs[a], dofs[b]] += kg[a, b]
    return k_full[np.ix_(model.free_dofs, model.free_dofs)]


def solve_displacements(model: FrameModel, inertias: np.ndarray) -> np.ndarray:
    """Free-DOF displacements for every load case, shape (n_free, n_cases)."""
    k = assemble_stiffness(model, inertias)
    try:
        return np.linalg.solve(k, model.loads)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            "stiffness is singular after support elimination: the frame is a "
            "mechanism or has insufficient supports") from exc


def solve_strains(model: FrameModel, inertias: np.ndarray) -> np.ndarray:
    """Analytical gauge strains, shape (n_gauges, n_cases).

    Gauge strain combines the axial strain with the bending term from the
    cubic Hermite interpolation: eps = du/dx - offset * w''(xi). Runs the
    same code path used to synthesize benchmark measurements, so values at
    the true parameters reproduce the measured data exactly.
    """
    inertias = np.asarray(inertias, dtype=float)
    if inertias.shape != (model.n_parameters,):
        raise ValueError(
            f"expected {model.n_parameters} inertia parameters, got shape {inertias.shape}")
    if np.any(inertias <= 0):
        raise ValueError("inertias must be positive")
    flat = model.forward()(inertias)
    return flat.reshape(model.n_gauges, model.n_load_cases)


def _precompute(model: FrameModel):
    """Flat arrays folded into the forward/objective closures."""
    n_elems = model.n_elements
    dof_pos = np.full(3 * model.n_nodes, -1, dtype=np.int64)
    for k, dof in enumerate(model.free_dofs):
        dof_pos[dof] = k
    elem_dofs = np.empty((n_elems, 6), dtype=np.int64)
    cos_l = np.empty(n_elems)
    sin_l = np.empty(n_elems)
    len_l = np.empty(n_elems)
    ea_l = np.empty(n_elems)
    for e in range(n_elems):
        i, j = model.conn[e]
        for a, dof in enumerate((3 * i, 3 * i + 1, 3 * i + 2, 3 * j, 3 * j + 1, 3 * j + 2)):
            elem_dofs[e, a] = dof_pos[dof]
        c, s, length = _element_geometry(model, e)
        cos_l[e], sin_l[e], len_l[e] = c, s, length
        ea_l[e] = model.elastic_modulus * model.areas[e]
    gauge_elem = np.array([g[0] for g in model.gauges], dtype=np.int64)
    gauge_pos = np.array([g[1] for g in model.gauges])
    gauge_off = np.array([g[2] for g in model.gauges])
    return (model.free_dofs.size, n_elems, elem_dofs, cos_l, sin_l, len_l, ea_l,
            model.param_index.copy(), model.elastic_modulus, model.loads.copy(),
            gauge_elem, gauge_pos, gauge_off)


def _make_forward(model: FrameModel):
    """Self-contained closure: inertias -> flat gauge strains (numba-compatible)."""
    (n_free, n_elems, elem_dofs, cos_l, sin_l, len_l, ea_l,
     param_index, emod, loads, gauge_elem, gauge_pos, gauge_off) = _precompute(model)
    n_cases = loads.shape[1]
    n_gauges = gauge_elem.size

    def forward(x):
        k_mat = np.zeros((n_free, n_free))
        for e in range(n_elems):
            c = cos_l[e]
            s = sin_l[e]
            L = len_l[e]
            ea = ea_l[e]
            ei = emod * x[param_index[e]]
            a_ax = ea / L
            b1 = 12.0 * ei / L**3
            b2 = 6.0 * ei / L**2
            b3 = 4.0 * ei / L
            b4 = 2.0 * ei / L
            cc = c * c
            ss = s * s
            cs = c * s
            k11 = a_ax * cc + b1 * ss
            k12 = (a_ax - b1) * cs
            k13 = -b2 * s
            k22 = a_ax * ss + b1 * cc
            k23 = b2 * c
            ke = np.empty((6, 6))
            ke[0, 0] = k11; ke[0, 1] = k12; ke[0, 2] = k13
            ke[0, 3] = -k11; ke[0, 4] = -k12; ke[0, 5] = k13
            ke[1, 1] = k22; ke[1, 2] = k23
            ke[1, 3] = -k12; ke[1, 4] = -k22; ke[1, 5] = k23
            ke[2, 2] = b3
            ke[2, 3] = b2 * s; ke[2, 4] = -b2 * c; ke[2, 5] = b4
            ke[3, 3] = k11; ke[3, 4] = k12; ke[3, 5] = -k13
            ke[4, 4] = k22; ke[4, 5] = -k23
            ke[5, 5] = b3
            for a in range(6):
                for b in range(a):
                    ke[a, b] = ke[b, a]
            for a in range(6):
                pa = elem_dofs[e, a]
                if pa < 0:
                    continue
                for b in range(6):
                    pb = elem_dofs[e, b]
                    if pb >= 0:
                        k_mat[pa, pb] += ke[a, b]
        u = np.linalg.solve(k_mat, loads)
        out = np.empty(n_gauges * n_cases)
        for gi in range(n_gauges):
            e = gauge_elem[gi]
            c = cos_l[e]
            s = sin_l[e]
            L = len_l[e]
            xg = gauge_pos[gi] * L
            off = gauge_off[gi]
            h1 = -6.0 / L**2 + 12.0 * xg / L**3
            h2 = -4.0 / L + 6.0 * xg / L**2
            h3 = 6.0 / L**2 - 12.0 * xg / L**3
            h4 = -2.0 / L + 6.0 * xg / L**2
            for lc in range(n_cases):
                ue = np.zeros(6)
                for a in range(6):
                    pa = elem_dofs[e, a]
                    if pa >= 0:
                        ue[a] = u[pa, lc]
                u1 = c * ue[0] + s * ue[1]
                w1 = -s * ue[0] + c * ue[1]
                u2 = c * ue[3] + s * ue[4]
                w2 = -s * ue[3] + c * ue[4]
                axial = (u2 - u1) / L
                curv = h1 * w1 + h2 * ue[2] + h3 * w2 + h4 * ue[5]
                out[gi * n_cases + lc] = axial - off * curv
        return out

    return forward


@dataclass(eq=False)
class IdentificationProblem:
    """Inverse problem: recover member inertias from measured gauge strains."""

    model: FrameModel
    measured: np.ndarray       # (n_gauges, n_cases)
    lower: np.ndarray          # (n_parameters,)
    upper: np.ndarray
    true_inertias: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.measured.shape != (self.model.n_gauges, self.model.n_load_cases):
            raise ValueError("measured strain matrix must be n_gauges x n_load_cases")
        if np.any(self.measured == 0.0):
            raise ValueError(
                "a measured strain is exactly zero; move the gauges or loads so "
                "every measurement is informative")

    @property
    def n_residuals(self) -> int:
        return self.measured.size


def identification_objective(problem: IdentificationProblem, inertias: np.ndarray) -> float:
    """Sum over gauges and load cases of |(measured - analytic) / measured|."""
    analytic = solve_strains(problem.model, inertias)
    return float(np.sum(np.abs((problem.measured - analytic) / problem.measured)))


def _default_geometry() -> dict:
    text = resources.files("batbench.data").joinpath("frame_benchmark.json").read_text()
    return json.loads(text)


def build_benchmark(source=None, noise_std: float = 0.0,
                    noise_seed: int = 0) -> IdentificationProblem:
    """Identification benchmark from a geometry definition file.

    Measured strains are synthesized by the forward model at the file's
    true inertias (so the optimum objective is exactly zero); ``noise_std``
    adds relative Gaussian noise for robustness studies.
    """
    if source is None:
        data = _default_geometry()
    elif isinstance(source, dict):
        data = source
    else:
        with open(source) as fh:
            data = json.load(fh)
    model = load_frame(data)
    x_true = np.asarray(data["true_inertias_cm4"], dtype=float)
    if x_true.shape != (model.n_parameters,):
        raise ValueError("true_inertias_cm4 length must match the parameter count")
    measured = solve_strains(model, x_true)
    if noise_std > 0.0:
        gen = np.random.default_rng(noise_seed)
        measured = measured * (1.0 + noise_std * gen.standard_normal(measured.shape))
    lo, hi = data["inertia_bounds_cm4"]
    bounds_lo = np.full(model.n_parameters, float(lo))
    bounds_hi = np.full(model.n_parameters, float(hi))
    return IdentificationProblem(model=model, measured=measured,
                                 lower=bounds_lo, upper=bounds_hi,
                                 true_inertias=x_true)


def _make_identification_raw(model: FrameModel, measured: np.ndarray):
    """Numba-compatible closure for the identification objective.

    Contains the full forward computation inline (compiled kernels cannot
    call plain-python closures), mirroring :func:`_make_forward` term for
    term over the same precomputed arrays.
    """
    (n_free, n_elems, elem_dofs, cos_l, sin_l, len_l, ea_l,
     param_index, emod, loads, gauge_elem, gauge_pos, gauge_off) = _precompute(model)
    n_cases = loads.shape[1]
    n_gauges = gauge_elem.size
    meas = measured.copy()

    def raw(x, g):
        k_mat = np.zeros((n_free, n_free))
        for e in range(n_elems):
            c = cos_l[e]
            s = sin_l[e]
            L = len_l[e]
            ea = ea_l[e]
            ei = emod * x[param_index[e]]
            a_ax = ea / L
            b1 = 12.0 * ei / L**3
            b2 = 6.0 * ei / L**2
            b3 = 4.0 * ei / L
            b4 = 2.0 * ei / L
            cc = c * c
            ss = s * s
            cs = c * s
            k11 = a_ax * cc + b1 * ss
            k12 = (a_ax - b1) * cs
            k13 = -b2 * s
            k22 = a_ax * ss + b1 * cc
            k23 = b2 * c
            ke = np.empty((6, 6))
            ke[0, 0] = k11; ke[0, 1] = k12; ke[0, 2] = k13
            ke[0, 3] = -k11; ke[0, 4] = -k12; ke[0, 5] = k13
            ke[1, 1] = k22; ke[1, 2] = k23
            ke[1, 3] = -k12; ke[1, 4] = -k22; ke[1, 5] = k23
            ke[2, 2] = b3
            ke[2, 3] = b2 * s; ke[2, 4] = -b2 * c; ke[2, 5] = b4
            ke[3, 3] = k11; ke[3, 4] = k12; ke[3, 5] = -k13
            ke[4, 4] = k22; ke[4, 5] = -k23
            ke[5, 5] = b3
            for a in range(6):
                for b in range(a):
                    ke[a, b] = ke[b, a]
            for a in range(6):
                pa = elem_dofs[e, a]
                if pa < 0:
                    continue
                for b in range(6):
                    pb = elem_dofs[e, b]
                    if pb >= 0:
                        k_mat[pa, pb] += ke[a, b]
        u = np.linalg.solve(k_mat, loads)
        total = 0.0
        for gi in range(n_gauges):
            e = gauge_elem[gi]
            c = cos_l[e]
            s = sin_l[e]
            L = len_l[e]
            xg = gauge_pos[gi] * L
            off = gauge_off[gi]
            h1 = -6.0 / L**2 + 12.0 * xg / L**3
            h2 = -4.0 / L + 6.0 * xg / L**2
            h3 = 6.0 / L**2 - 12.0 * xg / L**3
            h4 = -2.0 / L + 6.0 * xg / L**2
            for lc in range(n_cases):
                ue = np.zeros(6)
                for a in range(6):
                    pa = elem_dofs[e, a]
                    if pa >= 0:
                        ue[a] = u[pa, lc]
                u1 = c * ue[0] + s * ue[1]
                w1 = -s * ue[0] + c * ue[1]
                u2 = c * ue[3] + s * ue[4]
                w2 = -s * ue[3] + c * ue[4]
                axial = (u2 - u1) / L
                curv = h1 * w1 + h2 * ue[2] + h3 * w2 + h4 * ue[5]
                strain = axial - off * curv
                total += abs((meas[gi, lc] - strain) / meas[gi, lc])
        return total

    return raw


def make_identification_problem(ident: Optional[IdentificationProblem] = None,
                                name: str = "frame_identification") -> Problem:
    """Wrap an identification benchmark as a registry Problem (bounds only)."""
    if ident is None:
        ident = build_benchmark()
    known = None
    if ident.true_inertias is not None:
        known = KnownBest(position=ident.true_inertias.copy(), objective=0.0,
                          provenance="[construction] parameters used to synthesize the data")
    return Problem(
        name=name,
        dimension=ident.model.n_parameters,
        lower=ident.lower.copy(),
        upper=ident.upper.copy(),
        n_constraints=0,
        raw=_make_identification_raw(ident.model, ident.measured),
        known_best=known,
        notes="strain-residual parameter identification on a planar frame",
    )


register_problem("frame_identification", make_identification_problem)
