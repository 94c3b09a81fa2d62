"""Discretization of ``-Δu = f`` with Dirichlet data on brick meshes.

The exact reference basis of :mod:`brick14.element` is compiled to float
coefficient tables once per element and evaluated at quadrature points.
Because cells are axis-aligned, the local stiffness matrix of every cell is
a weighted sum of three reference Gram matrices, one per coordinate axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .element import DofKind, ElementDef, build_basis
from .mesh import BoxMesh, CellGeometry, DofMap, enumerate_dofs
from .numerics import SolveStats, SolverError, SparseSym, cg_solve, cube_rule, square_rule
from .numerics.quadrature import QuadRuleND

ASSEMBLY_POINTS = 5
ERROR_POINTS = 7

Field = Callable[[np.ndarray], np.ndarray]


# -- manufactured solutions ----------------------------------------------------


@dataclass(frozen=True)
class ManufacturedSolution:
    """Exact solution with gradient and forcing ``f = -Δu``.

    All callables take points of shape ``(..., 3)``; ``grad_u`` returns
    shape ``(..., 3)``. Boundary data is ``u`` itself.
    """

    name: str
    u: Callable
    grad_u: Callable
    f: Callable
    degree: int | None = None  # polynomial degree, None if transcendental

    def g(self, x):
        return self.u(x)


def _lin_u(x):
    return 1.0 + 2.0 * x[..., 0] - x[..., 1] + 0.5 * x[..., 2]


def _lin_grad(x):
    return np.broadcast_to(np.array([2.0, -1.0, 0.5]), x.shape).copy()


def _quad_u(x):
    return x[..., 0] ** 2 + x[..., 1] * x[..., 2]


def _quad_grad(x):
    return np.stack([2 * x[..., 0], x[..., 2], x[..., 1]], axis=-1)


def _cub_u(x):
    return np.sum(x**3, axis=-1)


def _cub_grad(x):
    return 3 * x**2


def _trig_u(x):
    return np.prod(np.sin(np.pi * x), axis=-1)


def _trig_grad(x):
    s, c = np.sin(np.pi * x), np.cos(np.pi * x)
    return np.pi * np.stack(
        [c[..., 0] * s[..., 1] * s[..., 2], s[..., 0] * c[..., 1] * s[..., 2], s[..., 0] * s[..., 1] * c[..., 2]],
        axis=-1,
    )


SOLUTIONS = {
    "linear": ManufacturedSolution("linear", _lin_u, _lin_grad, lambda x: np.zeros(x.shape[:-1]), 1),
    "quadratic": ManufacturedSolution("quadratic", _quad_u, _quad_grad, lambda x: np.full(x.shape[:-1], -2.0), 2),
    "cubic": ManufacturedSolution("cubic", _cub_u, _cub_grad, lambda x: -6.0 * np.sum(x, axis=-1), 3),
    "trig": ManufacturedSolution("trig", _trig_u, _trig_grad, lambda x: 3 * np.pi**2 * _trig_u(x), None),
}


def get_solution(name) -> ManufacturedSolution:
    if isinstance(name, ManufacturedSolution):
        return name
    try:
        return SOLUTIONS[str(name).lower()]
    except KeyError:
        raise ValueError(f"unknown manufactured solution {name!r}; choose from {sorted(SOLUTIONS)}") from None


def _as_field(obj) -> Field:
    if isinstance(obj, str):
        obj = get_solution(obj)
    if isinstance(obj, ManufacturedSolution):
        return obj.u
    if isinstance(obj, DiscreteSolution):
        return obj.evaluate
    if callable(obj):
        return obj
    raise TypeError("expected a ManufacturedSolution, DiscreteSolution or callable field")


# -- compiled reference basis -------------------------------------------------


@dataclass(frozen=True)
class CompiledBasis:
    """Float coefficient table: ``phi_i(x) = sum_t coef[i, t] * x^exps[t]``."""

    exps: np.ndarray  # (nt, 3)
    coef: np.ndarray  # (14, nt)

    @classmethod
    def from_element(cls, e: ElementDef) -> "CompiledBasis":
        exps = sorted({ex for p in e.basis for ex in p.terms}, key=lambda ex: (sum(ex), ex))
        coef = np.array([[float(p.coefficient(ex)) for ex in exps] for p in e.basis])
        return cls(np.array(exps, dtype=np.int64).reshape(-1, 3), coef)

    def _powers(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        maxe = int(self.exps.max(initial=0))
        pw = np.ones((maxe + 2,) + pts.shape)
        for k in range(1, maxe + 1):
            pw[k] = pw[k - 1] * pts
        return pw

    def values(self, pts) -> np.ndarray:
        """Basis values, shape ``(14, npts)``."""
        pw = self._powers(pts)
        e = self.exps
        mono = pw[e[:, 0], :, 0] * pw[e[:, 1], :, 1] * pw[e[:, 2], :, 2]
        return self.coef @ mono

    def gradients(self, pts) -> np.ndarray:
        """Reference gradients, shape ``(3, 14, npts)``."""
        pw = self._powers(pts)
        e = self.exps
        out = []
        for a in range(3):
            fac = e[:, a].astype(np.float64)
            lowered = e.copy()
            lowered[:, a] = np.maximum(lowered[:, a] - 1, 0)
            mono = pw[lowered[:, 0], :, 0] * pw[lowered[:, 1], :, 1] * pw[lowered[:, 2], :, 2]
            out.append(self.coef @ (fac[:, None] * mono))
        return np.stack(out)


@lru_cache(maxsize=None)
def compiled_basis(e: ElementDef) -> CompiledBasis:
    return CompiledBasis.from_element(e)


@lru_cache(maxsize=None)
def _axis_grams(e: ElementDef, n: int) -> np.ndarray:
    rule = cube_rule(n)
    grads = compiled_basis(e).gradients(rule.points)
    g = np.einsum("aiq,q,ajq->aij", grads, rule.weights, grads)
    # exact bitwise symmetry
    return 0.5 * (g + np.transpose(g, (0, 2, 1)))


def _rule_n(rule) -> int:
    if rule is None:
        return ASSEMBLY_POINTS
    if isinstance(rule, QuadRuleND):
        return rule.n1d
    return int(rule)


def local_stiffness(e: ElementDef, g: CellGeometry | None = None, rule=None) -> np.ndarray:
    """``S[i, j] = ∫_K ∇φ_i · ∇φ_j`` for one cell (or a batch of cells)."""
    g = g or CellGeometry.reference()
    grams = _axis_grams(e, _rule_n(rule))
    h = np.asarray(g.half_extents, dtype=np.float64)
    scale = np.prod(h, axis=-1)[..., None] / h**2
    return np.einsum("...a,aij->...ij", scale, grams)


def local_load(f: Field, e: ElementDef, g: CellGeometry | None = None, rule=None) -> np.ndarray:
    """``b[i] = ∫_K f φ_i`` by tensor Gauss quadrature."""
    g = g or CellGeometry.reference()
    r = cube_rule(_rule_n(rule))
    phi = compiled_basis(e).values(r.points)
    pts = g.map(r.points)
    fv = np.asarray(f(pts), dtype=np.float64)
    return np.einsum("...q,q,iq->...i", fv, r.weights, phi) * np.asarray(g.jacobian)[..., None]


# -- global system ------------------------------------------------------------


def assemble(m: BoxMesh, d: DofMap, e: ElementDef, f: Field | None = None, rule=None, backend=None):
    """Global stiffness matrix and load vector over all DOFs (no boundary conditions)."""
    if d.dof_kind is not e.dof_kind:
        raise ValueError(f"DOF map built for {d.dof_kind}, element uses {e.dof_kind}")
    geom = m.geometry
    s = local_stiffness(e, geom, rule)
    cd = d.cell_dofs
    rows = np.repeat(cd, 14, axis=1).ravel()
    cols = np.tile(cd, (1, 14)).ravel()
    a = SparseSym.from_triplets(d.n_dofs, rows, cols, s.ravel(), backend=backend)
    b = np.zeros(d.n_dofs)
    if f is not None:
        lb = local_load(f, e, geom, rule)
        b = np.bincount(cd.ravel(), weights=lb.ravel(), minlength=d.n_dofs)
    return a, b


def dof_values(fld, d: DofMap, n_face: int = ERROR_POINTS) -> np.ndarray:
    """DOF functionals of a field: point values, or face means for integral DOFs."""
    fn = _as_field(fld)
    vals = np.asarray(fn(d.positions), dtype=np.float64).copy()
    if d.dof_kind is DofKind.FACE_INTEGRAL_AVERAGE:
        faces = np.flatnonzero(d.axis > 0)
        r = square_rule(n_face)
        for axis in (1, 2, 3):
            sel = faces[d.axis[faces] == axis]
            if sel.size == 0:
                continue
            tang = [k for k in range(3) if k != axis - 1]
            ref = np.zeros((r.points.shape[0], 3))
            ref[:, tang] = r.points
            pts = d.positions[sel][:, None, :] + d.face_half_extents[sel][:, None, :] * ref
            vals[sel] = np.asarray(fn(pts)) @ r.weights / 4.0
    return vals


@dataclass(frozen=True)
class LinearSystem:
    """Reduced SPD system on the free DOFs plus the fixed boundary values."""

    matrix: SparseSym
    rhs: np.ndarray
    free: np.ndarray
    fixed: np.ndarray
    fixed_values: np.ndarray
    full_matrix: SparseSym
    full_rhs: np.ndarray


def apply_dirichlet(system, d: DofMap, g=None) -> LinearSystem:
    """Fix boundary DOFs to the DOF functionals of ``g`` and eliminate them.

    ``g`` may be a field, a :class:`ManufacturedSolution`, an array of values
    on the boundary DOFs, or ``None`` for homogeneous data.
    """
    a, b = system
    free, fixed = d.free, d.fixed
    if g is None:
        gv = np.zeros(fixed.size)
    elif isinstance(g, np.ndarray) or isinstance(g, (list, tuple)):
        gv = np.asarray(g, dtype=np.float64)
        if gv.size == d.n_dofs:
            gv = gv[fixed]
        elif gv.size != fixed.size:
            raise ValueError("boundary values must cover all or only the fixed DOFs")
    else:
        gv = dof_values(g, d)[fixed]
    corr = a.columns_times(fixed, gv) if fixed.size else np.zeros(d.n_dofs)
    rhs = (b - corr)[free]
    return LinearSystem(a.submatrix(free), rhs, free, fixed, gv, a, b)


@dataclass
class DiscreteSolution:
    mesh: BoxMesh
    element: ElementDef
    dofmap: DofMap
    coefficients: np.ndarray
    stats: SolveStats | None = None
    system: LinearSystem | None = field(default=None, repr=False)

    def cell_coefficients(self) -> np.ndarray:
        return self.coefficients[self.dofmap.cell_dofs]

    def locate(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Cell index and reference coordinates of physical points."""
        pts = np.asarray(pts, dtype=np.float64)
        idx = []
        for a, c in enumerate(self.mesh.coords):
            i = np.searchsorted(c, pts[..., a], side="right") - 1
            idx.append(np.clip(i, 0, c.size - 2))
        nx, ny, nz = self.mesh.shape
        cell = (idx[0] * ny + idx[1]) * nz + idx[2]
        g = self.mesh.geometry
        ref = (pts - g.center[cell]) / g.half_extents[cell]
        return cell, ref

    def evaluate(self, pts) -> np.ndarray:
        """Piecewise-polynomial value at arbitrary points of the box."""
        pts = np.asarray(pts, dtype=np.float64)
        shape = pts.shape[:-1]
        cell, ref = self.locate(pts.reshape(-1, 3))
        phi = compiled_basis(self.element).values(ref)  # (14, npts)
        out = np.einsum("pi,ip->p", self.cell_coefficients()[cell], phi)
        return out.reshape(shape)

    def export(self, path) -> None:
        """Write ``kind index x y z coefficient`` rows."""
        d = self.dofmap
        labels = d.entity_labels()
        with Path(path).open("w") as fh:
            fh.write(f"# element={self.element.element_type} dof_kind={d.dof_kind}\n")
            fh.write("kind index x y z coefficient\n")
            for i in range(d.n_dofs):
                x, y, z = (float(v) for v in d.positions[i])
                fh.write(f"{labels[i]} {i} {x!r} {y!r} {z!r} {float(self.coefficients[i])!r}\n")


def _element(e, kind=None) -> ElementDef:
    if isinstance(e, ElementDef):
        return e
    return build_basis(e, DofKind.parse(kind or DofKind.FACE_CENTROID_VALUE))


def solve_poisson(
    m: BoxMesh,
    e,
    sol,
    rule=None,
    tol: float = 1e-12,
    maxit: int | None = None,
    precond: str = "diagonal",
    backend=None,
    raise_on_failure: bool = True,
) -> DiscreteSolution:
    """Assemble, impose ``u`` on the boundary, and CG-solve."""
    e = _element(e)
    sol = get_solution(sol)
    d = enumerate_dofs(m, e.dof_kind)
    system = apply_dirichlet(assemble(m, d, e, sol.f, rule, backend), d, sol.u)
    coef = np.zeros(d.n_dofs)
    coef[system.fixed] = system.fixed_values
    if system.free.size:
        x, stats = cg_solve(system.matrix, system.rhs, tol=tol, maxit=maxit, precond=precond, backend=backend)
        if raise_on_failure and not stats.converged:
            raise SolverError(stats)
        coef[system.free] = x
    else:
        stats = SolveStats(0, 0.0, True, tol)
    return DiscreteSolution(m, e, d, coef, stats, system)


def interpolate(sol, m: BoxMesh, d: DofMap | None = None, e=None) -> DiscreteSolution:
    """Global nodal interpolant: every DOF set to the DOF functional of the field."""
    e = _element(e)
    d = d or enumerate_dofs(m, e.dof_kind)
    return DiscreteSolution(m, e, d, dof_values(sol, d))


# -- errors -------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorPair:
    l2: float
    energy: float


def _cell_points(m: BoxMesh, n: int):
    r = cube_rule(n)
    g = m.geometry
    return r, g, g.map(r.points)  # (nc, nq, 3)


CHUNK_CELLS = 2048


def _chunks(n_cells: int):
    for start in range(0, n_cells, CHUNK_CELLS):
        yield slice(start, min(start + CHUNK_CELLS, n_cells))


def error_norms(uh: DiscreteSolution, sol, rule=ERROR_POINTS) -> ErrorPair:
    """L2 error and broken H1-seminorm error by cellwise quadrature."""
    sol = get_solution(sol)
    r = cube_rule(_rule_n(rule))
    g = uh.mesh.geometry
    cb = compiled_basis(uh.element)
    phi = cb.values(r.points)
    dphi = cb.gradients(r.points)
    cc_all = uh.cell_coefficients()
    l2 = en = 0.0
    for sl in _chunks(uh.mesh.n_cells):
        geo = CellGeometry(g.center[sl], g.half_extents[sl])
        pts = geo.map(r.points)
        cc = cc_all[sl]
        eu = sol.u(pts) - cc @ phi
        eg = sol.grad_u(pts) - np.einsum("ci,aiq->cqa", cc, dphi) / geo.half_extents[:, None, :]
        w = r.weights[None, :] * geo.jacobian[:, None]
        l2 += float(np.sum(w * eu**2))
        en += float(np.sum(w * np.sum(eg**2, axis=-1)))
    return ErrorPair(math.sqrt(max(l2, 0.0)), math.sqrt(max(en, 0.0)))


# -- consistency --------------------------------------------------------------


def consistency_residual(sol, m: BoxMesh, d: DofMap, e, method: str = "faces", n: int = ERROR_POINTS) -> np.ndarray:
    """``r_j = a_h(u, φ_j) - <f, φ_j>`` for every global basis function.

    ``method="faces"`` sums the boundary fluxes ``<∂u/∂ν, φ_j>_{∂K}`` over
    all cell faces; ``"volume"`` integrates ``∇u·∇φ_j - f φ_j`` directly.
    """
    sol = get_solution(sol)
    e = _element(e, d.dof_kind)
    cb = compiled_basis(e)
    g = m.geometry
    local = np.zeros((m.n_cells, 14))
    if method == "volume":
        r = cube_rule(n)
        pts = g.map(r.points)
        phi = cb.values(r.points)
        dphi = cb.gradients(r.points)
        # physical ∇φ = reference ∇φ / h, folded into the u-gradient factor
        gu = sol.grad_u(pts) / g.half_extents[:, None, :]
        w = r.weights[None, :] * g.jacobian[:, None]
        local = np.einsum("cqa,aiq,cq->ci", gu, dphi, w) - np.einsum("cq,iq,cq->ci", sol.f(pts), phi, w)
    elif method == "faces":
        r2 = square_rule(n)
        for axis in (1, 2, 3):
            k = axis - 1
            tang = [t for t in range(3) if t != k]
            jf = np.prod(g.half_extents[:, tang], axis=1)
            for side in (-1.0, 1.0):
                ref = np.zeros((r2.points.shape[0], 3))
                ref[:, tang] = r2.points
                ref[:, k] = side
                phi = cb.values(ref)
                pts = g.map(ref)
                dn = side * sol.grad_u(pts)[..., k]
                local += np.einsum("cq,q,iq->ci", dn, r2.weights, phi) * jf[:, None]
    else:
        raise ValueError("method must be 'faces' or 'volume'")
    return np.bincount(d.cell_dofs.ravel(), weights=local.ravel(), minlength=d.n_dofs)


def consistency_functional(
    sol,
    m: BoxMesh,
    d: DofMap | None = None,
    e=None,
    measure: str = "dual",
    tol: float = 1e-12,
    backend=None,
) -> float:
    """Size of the consistency residual on the free DOFs.

    ``measure="dual"`` is the exact dual norm ``sup_w |r(w)| / ||w||_h`` over
    the discrete test space, i.e. ``sqrt(r^T A^{-1} r)`` with the reduced
    stiffness matrix. ``measure="basis"`` is ``max_j |r(φ_j)| / ||φ_j||_h``.
    """
    e = _element(e)
    d = d or enumerate_dofs(m, e.dof_kind)
    res = consistency_residual(sol, m, d, e)[d.free]
    a, _ = assemble(m, d, e, None, backend=backend)
    af = a.submatrix(d.free)
    if measure == "basis":
        return float(np.max(np.abs(res) / np.sqrt(af.diagonal()), initial=0.0))
    if measure != "dual":
        raise ValueError("measure must be 'dual' or 'basis'")
    if not np.any(res):
        return 0.0
    z, stats = cg_solve(af, res, tol=tol, backend=backend)
    if not stats.converged:
        raise SolverError(stats)
    return math.sqrt(max(float(res @ z), 0.0))
