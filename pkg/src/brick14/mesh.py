"""Axis-aligned tensor-product brick meshes and vertex/face DOF numbering.

Numbering conventions
---------------------
* cells ``(i, j, k)`` lexicographic with ``i`` slowest;
* vertices ``(i, j, k)`` lexicographic, ids ``0 .. nV-1``;
* faces grouped by normal axis (x1, then x2, then x3), each group
  lexicographic in the lower-corner index, ids ``nV .. nV+nF-1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .element import DofKind


class MeshError(ValueError):
    """Degenerate or non-monotone grid."""


@dataclass(frozen=True)
class CellGeometry:
    """Affine map ``x = center + half_extents * xhat`` of one or more cells."""

    center: np.ndarray
    half_extents: np.ndarray

    @property
    def jacobian(self):
        return np.prod(self.half_extents, axis=-1)

    def map(self, xhat):
        return self.center[..., None, :] + self.half_extents[..., None, :] * np.asarray(xhat)

    @classmethod
    def reference(cls) -> "CellGeometry":
        return cls(np.zeros(3), np.ones(3))


class BoxMesh:
    """Structured brick partition given by three strictly increasing grid-line arrays."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float], zs: Sequence[float]):
        axes = []
        for name, c in zip("xyz", (xs, ys, zs)):
            c = np.asarray(c, dtype=np.float64)
            if c.ndim != 1 or c.size < 2:
                raise MeshError(f"{name}-axis needs at least two grid lines")
            if not np.all(np.isfinite(c)) or np.any(np.diff(c) <= 0):
                raise MeshError(f"{name}-axis coordinates must be strictly increasing")
            c.setflags(write=False)
            axes.append(c)
        self.coords = tuple(axes)

    def __repr__(self):
        return f"BoxMesh(cells={self.shape}, lo={self.lo.tolist()}, hi={self.hi.tolist()})"

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(c.size - 1 for c in self.coords)

    @property
    def lo(self):
        return np.array([c[0] for c in self.coords])

    @property
    def hi(self):
        return np.array([c[-1] for c in self.coords])

    @property
    def n_cells(self) -> int:
        nx, ny, nz = self.shape
        return nx * ny * nz

    @property
    def n_vertices(self) -> int:
        nx, ny, nz = self.shape
        return (nx + 1) * (ny + 1) * (nz + 1)

    @property
    def face_class_sizes(self) -> tuple[int, int, int]:
        nx, ny, nz = self.shape
        return ((nx + 1) * ny * nz, nx * (ny + 1) * nz, nx * ny * (nz + 1))

    @property
    def n_faces(self) -> int:
        return sum(self.face_class_sizes)

    @cached_property
    def geometry(self) -> CellGeometry:
        """Centers and half-extents of all cells, shape ``(n_cells, 3)``."""
        mids = [0.5 * (c[1:] + c[:-1]) for c in self.coords]
        halves = [0.5 * np.diff(c) for c in self.coords]
        cm = np.stack([g.ravel() for g in np.meshgrid(*mids, indexing="ij")], axis=1)
        hm = np.stack([g.ravel() for g in np.meshgrid(*halves, indexing="ij")], axis=1)
        return CellGeometry(cm, hm)

    @property
    def h(self) -> float:
        """Largest cell diameter."""
        return float(np.max(2.0 * np.linalg.norm(self.geometry.half_extents, axis=1)))

    def cell_geometry(self, c: int) -> CellGeometry:
        g = self.geometry
        return CellGeometry(g.center[c], g.half_extents[c])

    # -- entity ids ------------------------------------------------------

    def vertex_id(self, i, j, k):
        nx, ny, nz = self.shape
        return (np.asarray(i) * (ny + 1) + j) * (nz + 1) + k

    def face_id(self, axis: int, i, j, k):
        """Global face id (0-based among faces) from the lower-corner index."""
        nx, ny, nz = self.shape
        s1, s2, _ = self.face_class_sizes
        i = np.asarray(i)
        if axis == 1:
            return (i * ny + j) * nz + k
        if axis == 2:
            return s1 + (i * (ny + 1) + j) * nz + k
        if axis == 3:
            return s1 + s2 + (i * ny + j) * (nz + 1) + k
        raise ValueError("axis must be 1, 2 or 3")

    def cell_indices(self):
        nx, ny, nz = self.shape
        return [g.ravel() for g in np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij")]

    @cached_property
    def vertex_positions(self) -> np.ndarray:
        return np.stack([g.ravel() for g in np.meshgrid(*self.coords, indexing="ij")], axis=1)

    @cached_property
    def _faces(self):
        """Per-face (centroid, normal axis, tangential half-extents, interior flag)."""
        cents, axes, halves, interior = [], [], [], []
        mids = [0.5 * (c[1:] + c[:-1]) for c in self.coords]
        hws = [0.5 * np.diff(c) for c in self.coords]
        for axis in (1, 2, 3):
            k = axis - 1
            grid = [mids[d] if d != k else self.coords[d] for d in range(3)]
            hgrid = [hws[d] if d != k else np.zeros(self.coords[d].size) for d in range(3)]
            inner = np.zeros(self.coords[k].size, dtype=bool)
            inner[1:-1] = True
            igrid = [np.ones(grid[d].size, dtype=bool) if d != k else inner for d in range(3)]
            cents.append(np.stack([g.ravel() for g in np.meshgrid(*grid, indexing="ij")], axis=1))
            halves.append(np.stack([g.ravel() for g in np.meshgrid(*hgrid, indexing="ij")], axis=1))
            ig = np.meshgrid(*igrid, indexing="ij")
            interior.append((ig[0] & ig[1] & ig[2]).ravel())
            axes.append(np.full(cents[-1].shape[0], axis, dtype=np.int64))
        return (np.concatenate(cents), np.concatenate(axes), np.concatenate(halves), np.concatenate(interior))

    @property
    def face_centroids(self) -> np.ndarray:
        return self._faces[0]

    @property
    def face_axes(self) -> np.ndarray:
        return self._faces[1]

    @property
    def face_half_extents(self) -> np.ndarray:
        return self._faces[2]

    @property
    def face_interior(self) -> np.ndarray:
        return self._faces[3]

    @cached_property
    def vertex_on_boundary(self) -> np.ndarray:
        flags = [np.zeros(c.size, dtype=bool) for c in self.coords]
        for f in flags:
            f[[0, -1]] = True
        g = np.meshgrid(*flags, indexing="ij")
        return (g[0] | g[1] | g[2]).ravel()

    @cached_property
    def cell_faces(self) -> np.ndarray:
        """Face ids of each cell, order ``x1-, x1+, x2-, x2+, x3-, x3+``."""
        i, j, k = self.cell_indices()
        return np.stack(
            [
                self.face_id(1, i, j, k),
                self.face_id(1, i + 1, j, k),
                self.face_id(2, i, j, k),
                self.face_id(2, i, j + 1, k),
                self.face_id(3, i, j, k),
                self.face_id(3, i, j, k + 1),
            ],
            axis=1,
        ).astype(np.int64)

    @cached_property
    def cell_vertices(self) -> np.ndarray:
        """Vertex ids of each cell in reference-vertex order."""
        i, j, k = self.cell_indices()
        cols = [self.vertex_id(i + a, j + b, k + c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]
        return np.stack(cols, axis=1).astype(np.int64)


def build_mesh(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0), cells=(1, 1, 1), coordinates=None) -> BoxMesh:
    """Uniform grid on ``[lo, hi]``, or explicit grid lines via ``coordinates``."""
    if coordinates is not None:
        return BoxMesh(*coordinates)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if lo.shape != (3,) or hi.shape != (3,):
        raise MeshError("lo and hi must have three components")
    if np.any(hi <= lo):
        raise MeshError("box requires lo < hi componentwise")
    cells = tuple(int(n) for n in cells)
    if len(cells) != 3 or min(cells) < 1:
        raise MeshError("need a positive cell count per axis")
    return BoxMesh(*(np.linspace(a, b, n + 1) for a, b, n in zip(lo, hi, cells)))


def read_grid_file(path) -> BoxMesh:
    """Grid file: three non-comment lines, one axis of coordinates per line."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) != 3:
        raise MeshError(f"grid file needs exactly three coordinate lines, found {len(lines)}")
    axes = [[float(v) for v in ln.replace(",", " ").split()] for ln in lines]
    return BoxMesh(*axes)


@dataclass(frozen=True)
class FaceClasses:
    """Face ids (0-based among faces) per normal axis, plus interior flags."""

    members: dict  # axis -> ndarray of face ids
    interior: np.ndarray

    def count(self, axis: int) -> int:
        return int(self.members[axis].size)

    def interior_count(self, axis: int) -> int:
        return int(np.count_nonzero(self.interior[self.members[axis]]))


def classify_faces(m: BoxMesh) -> FaceClasses:
    ax = m.face_axes
    return FaceClasses({a: np.flatnonzero(ax == a) for a in (1, 2, 3)}, m.face_interior.copy())


@dataclass(frozen=True)
class DofMap:
    """Global numbering of vertex and face DOFs.

    ``positions`` are vertex coordinates or face centroids; ``axis`` is 0 for
    vertex DOFs and the face normal axis otherwise.
    """

    mesh: BoxMesh
    dof_kind: DofKind
    n_dofs: int
    cell_dofs: np.ndarray
    boundary: np.ndarray
    positions: np.ndarray
    axis: np.ndarray
    face_half_extents: np.ndarray

    @property
    def free(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    @property
    def fixed(self) -> np.ndarray:
        return np.flatnonzero(self.boundary)

    @property
    def n_free(self) -> int:
        return int(np.count_nonzero(~self.boundary))

    def entity_labels(self) -> list[str]:
        face_tag = "face-centroid" if self.dof_kind is DofKind.FACE_CENTROID_VALUE else "face-average"
        return ["vertex" if a == 0 else face_tag for a in self.axis]


def enumerate_dofs(m: BoxMesh, kind=DofKind.FACE_CENTROID_VALUE) -> DofMap:
    kind = DofKind.parse(kind)
    nv = m.n_vertices
    cell_dofs = np.concatenate([m.cell_vertices, nv + m.cell_faces], axis=1)
    boundary = np.concatenate([m.vertex_on_boundary, ~m.face_interior])
    positions = np.concatenate([m.vertex_positions, m.face_centroids])
    axis = np.concatenate([np.zeros(nv, dtype=np.int64), m.face_axes])
    halves = np.concatenate([np.zeros((nv, 3)), m.face_half_extents])
    for arr in (cell_dofs, boundary, positions, axis, halves):
        arr.setflags(write=False)
    return DofMap(m, kind, nv + m.n_faces, cell_dofs, boundary, positions, axis, halves)
