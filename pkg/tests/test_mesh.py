import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brick14.element import CENTROID, FACES
from brick14.mesh import MeshError, build_mesh, classify_faces, enumerate_dofs, read_grid_file

shapes = st.tuples(*[st.integers(1, 8)] * 3)


def test_unit_cube_counts():
    m = build_mesh(cells=(2, 2, 2))
    assert (m.n_vertices, m.n_faces, m.n_cells) == (27, 36, 8)
    c = classify_faces(m)
    assert [c.count(a) for a in (1, 2, 3)] == [12, 12, 12]


def test_single_cell():
    m = build_mesh(cells=(1, 1, 1))
    d = enumerate_dofs(m)
    assert (m.n_vertices, m.n_faces, d.n_dofs, d.n_free) == (8, 6, 14, 0)
    c = classify_faces(m)
    assert [c.count(a) for a in (1, 2, 3)] == [2, 2, 2]
    assert [c.interior_count(a) for a in (1, 2, 3)] == [0, 0, 0]


def test_face_classes_of_a_strip():
    c = classify_faces(build_mesh(cells=(2, 1, 1)))
    assert c.count(1) == 3 and c.interior_count(1) == 1


def test_box_diameter():
    m = build_mesh((0, 0, 0), (2, 1, 1), (4, 2, 2))
    assert m.n_vertices == 45
    assert math.isclose(m.h, math.sqrt(3) / 2, rel_tol=1e-15)


def test_two_by_two_dof_counts():
    d = enumerate_dofs(build_mesh(cells=(2, 2, 2)))
    assert d.n_dofs == 63 and d.n_free == 13


@settings(max_examples=40, deadline=None)
@given(shapes)
def test_counting_formulas(shape):
    nx, ny, nz = shape
    m = build_mesh(cells=shape)
    assert m.n_vertices == (nx + 1) * (ny + 1) * (nz + 1)
    assert m.n_faces == nx * ny * (nz + 1) + nx * (ny + 1) * nz + (nx + 1) * ny * nz
    d = enumerate_dofs(m)
    assert d.n_dofs == m.n_vertices + m.n_faces
    interior = (nx - 1) * (ny - 1) * (nz - 1) + (nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1)
    assert d.n_free == interior


@settings(max_examples=30, deadline=None)
@given(shapes)
def test_dof_map_topology(shape):
    m = build_mesh(cells=shape)
    d = enumerate_dofs(m)
    cd = d.cell_dofs
    assert all(len(set(row)) == 14 for row in cd.tolist())
    used = np.unique(cd)
    assert used.tolist() == list(range(d.n_dofs))
    nv = m.n_vertices
    counts = np.bincount(cd[:, 8:].ravel() - nv, minlength=m.n_faces)
    assert np.all(counts[m.face_interior] == 2)
    assert np.all(counts[~m.face_interior] == 1)


@settings(max_examples=20, deadline=None)
@given(shapes)
def test_local_nodes_land_on_global_entities(shape):
    m = build_mesh((0, -1, 2), (1, 1, 5), shape)
    d = enumerate_dofs(m)
    g = m.geometry
    for local, node in enumerate(FACES):
        glob = d.cell_dofs[:, 8 + local]
        # the face normal class is preserved by the axis-aligned map
        assert np.all(d.axis[glob] == node.axis)
        expect = g.center + g.half_extents * np.array(node.coords)
        np.testing.assert_allclose(d.positions[glob], expect, atol=1e-14)
    for local in range(8):
        from brick14.element import VERTICES

        expect = g.center + g.half_extents * np.array(VERTICES[local].coords)
        np.testing.assert_allclose(d.positions[d.cell_dofs[:, local]], expect, atol=1e-14)


def test_boundary_flags_match_positions():
    m = build_mesh(cells=(3, 2, 4))
    d = enumerate_dofs(m, CENTROID)
    p = d.positions
    on = np.any(np.isclose(p, 0.0) | np.isclose(p, 1.0), axis=1)
    np.testing.assert_array_equal(on, d.boundary)
    assert d.entity_labels().count("vertex") == m.n_vertices


@pytest.mark.parametrize(
    "kwargs",
    [dict(lo=(0, 0, 0), hi=(1, 0, 1), cells=(1, 1, 1)), dict(cells=(0, 1, 1)), dict(coordinates=([0, 1], [0, 0.5, 0.5], [0, 1]))],
)
def test_degenerate_meshes_rejected(kwargs):
    with pytest.raises(MeshError):
        build_mesh(**kwargs)


def test_grid_file(tmp_path):
    f = tmp_path / "grid.txt"
    f.write_text("# graded\n0 0.1 0.3 1\n0, 0.5, 1\n0 1\n")
    m = read_grid_file(f)
    assert m.shape == (3, 2, 1)
    f.write_text("0 1\n0 1\n")
    with pytest.raises(MeshError):
        read_grid_file(f)
