import math
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sps
from hypothesis import given, settings
from hypothesis import strategies as st

from brick14.numerics import BACKENDS, SparseSym, cg_solve, cube_rule, gauss_rule, square_rule, tensor_rule
from brick14.poly import Poly3, integrate_box


@pytest.mark.parametrize("n", range(1, 17))
def test_gauss_rule_matches_reference_implementation(n):
    r = gauss_rule(n)
    xs, ws = np.polynomial.legendre.leggauss(n)
    np.testing.assert_allclose(r.nodes, xs, atol=2e-15)
    np.testing.assert_allclose(r.weights, ws, atol=2e-15)
    assert np.all(r.weights > 0)
    assert math.isclose(r.weights.sum(), 2.0, rel_tol=1e-15)
    np.testing.assert_array_equal(r.nodes, -r.nodes[::-1])


def test_classical_rules():
    assert gauss_rule(1).nodes.tolist() == [0.0] and gauss_rule(1).weights.tolist() == [2.0]
    r2 = gauss_rule(2)
    np.testing.assert_allclose(r2.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
    np.testing.assert_allclose(r2.weights, [1.0, 1.0], rtol=1e-15)
    r5 = gauss_rule(5)
    assert abs(np.sum(r5.weights * r5.nodes**8) - 2 / 9) < 1e-14


@pytest.mark.parametrize("n", [0, 17, -3])
def test_gauss_rule_range(n):
    with pytest.raises(ValueError):
        gauss_rule(n)


@pytest.mark.parametrize("n", range(1, 17))
def test_one_dimensional_exactness(n):
    r = gauss_rule(n)
    for k in range(2 * n):
        exact = 2 / (k + 1) if k % 2 == 0 else 0.0
        assert abs(np.sum(r.weights * r.nodes**k) - exact) <= 1e-14 * max(1.0, exact)


def test_tensor_rule_weight_sums():
    assert math.isclose(cube_rule(4).weights.sum(), 8.0, rel_tol=1e-14)
    assert math.isclose(square_rule(3).weights.sum(), 4.0, rel_tol=1e-14)
    t = tensor_rule(3, 2)
    assert t.points.shape == (9, 2) and t.dim == 2


@st.composite
def random_poly(draw, n):
    deg = 2 * n - 1
    exps = st.tuples(*[st.integers(0, deg)] * 3)
    terms = draw(st.dictionaries(exps, st.integers(-20, 20).map(lambda c: Fraction(c, 7)), min_size=1, max_size=8))
    return n, Poly3(terms)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8).flatmap(random_poly))
def test_cube_rule_matches_exact_integration(case):
    n, p = case
    r = cube_rule(n)
    pts = r.points
    vals = np.zeros(len(pts))
    for e, c in p.terms.items():
        vals += float(c) * pts[:, 0] ** e[0] * pts[:, 1] ** e[1] * pts[:, 2] ** e[2]
    exact = float(integrate_box(p))
    scale = sum(abs(float(c)) for c in p.terms.values()) * 8
    assert abs(vals @ r.weights - exact) <= 1e-13 * max(abs(exact), scale)


def _random_spd(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    return m @ m.T + n * np.eye(n)


def test_triplets_sum_duplicates(backend):
    rows = [0, 2, 0, 1, 2, 0]
    cols = [0, 1, 0, 1, 1, 2]
    vals = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    a = SparseSym.from_triplets(3, rows, cols, vals, backend=backend)
    ref = sps.coo_matrix((vals, (rows, cols)), shape=(3, 3)).toarray()
    np.testing.assert_array_equal(a.to_dense(), ref)
    assert a.indptr.tolist() == [0, 2, 3, 4]
    assert a.indices.tolist() == [0, 2, 1, 1]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.integers(0, 10_000))
def test_csr_against_scipy(n, seed):
    rng = np.random.default_rng(seed)
    k = 4 * n
    rows, cols = rng.integers(0, n, k), rng.integers(0, n, k)
    vals = rng.standard_normal(k)
    ref = sps.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    x = rng.standard_normal(n)
    for b in BACKENDS:
        a = SparseSym.from_triplets(n, rows, cols, vals, backend=b)
        np.testing.assert_allclose(a.to_dense(), ref.toarray(), atol=1e-14)
        np.testing.assert_allclose(a.matvec(x, backend=b), ref @ x, atol=1e-13)


def test_backends_agree_bitwise_on_csr_structure():
    rng = np.random.default_rng(7)
    rows, cols = rng.integers(0, 50, 500), rng.integers(0, 50, 500)
    vals = rng.standard_normal(500)
    got = [SparseSym.from_triplets(50, rows, cols, vals, backend=b) for b in BACKENDS]
    for a in got[1:]:
        np.testing.assert_array_equal(a.indptr, got[0].indptr)
        np.testing.assert_array_equal(a.indices, got[0].indices)
        np.testing.assert_allclose(a.data, got[0].data, rtol=1e-15, atol=1e-15)


def test_submatrix_and_diagonal():
    d = _random_spd(6, 1)
    a = SparseSym.from_dense(d)
    keep = np.array([0, 2, 5])
    np.testing.assert_array_equal(a.submatrix(keep).to_dense(), d[np.ix_(keep, keep)])
    np.testing.assert_array_equal(a.diagonal(), np.diag(d))
    v = np.array([1.0, -2.0])
    np.testing.assert_allclose(a.columns_times([1, 3], v), d[:, [1, 3]] @ v)
    assert a.symmetry_defect() <= 1e-14


def test_dump_round_trip(tmp_path):
    a = SparseSym.from_dense(_random_spd(5, 3))
    p = tmp_path / "a.txt"
    a.dump(p)
    assert p.read_text().splitlines()[0] == f"% 5 5 {a.nnz}"
    b = SparseSym.load(p)
    np.testing.assert_array_equal(a.to_dense(), b.to_dense())


def test_cg_identity(backend):
    b = np.arange(1.0, 6.0)
    x, st_ = cg_solve(SparseSym.from_dense(np.eye(5)), b, backend=backend)
    np.testing.assert_array_equal(x, b)
    assert st_.iterations == 1 and st_.converged


def test_cg_diagonal(backend):
    x, st_ = cg_solve(SparseSym.from_dense(np.diag([1.0, 2.0, 3.0])), np.array([1.0, 2.0, 3.0]), backend=backend)
    np.testing.assert_allclose(x, 1.0, rtol=1e-14)
    assert st_.converged


@pytest.mark.parametrize("precond", ["diagonal", None])
def test_cg_tridiagonal_poisson(backend, precond):
    n = 8
    d = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    xt = np.arange(1.0, n + 1)
    x, st_ = cg_solve(SparseSym.from_dense(d), d @ xt, tol=1e-12, precond=precond, backend=backend)
    assert st_.converged and st_.residual <= 1e-12
    assert np.linalg.norm(d @ x - d @ xt) / np.linalg.norm(d @ xt) <= 1e-12
    np.testing.assert_allclose(x, xt, rtol=1e-10)


def test_cg_reports_non_convergence(backend):
    d = _random_spd(30, 5)
    _, st_ = cg_solve(SparseSym.from_dense(d), np.ones(30), maxit=2, backend=backend)
    assert not st_.converged and st_.residual > st_.tolerance and st_.iterations == 2


def test_cg_rejects_bad_input():
    a = SparseSym.from_dense(np.eye(3))
    with pytest.raises(ValueError):
        cg_solve(a, np.ones(4))
    with pytest.raises(ValueError):
        cg_solve(a, np.ones(3), precond="ilu")


@pytest.mark.parametrize("seed", range(4))
def test_cg_energy_error_is_non_increasing(backend, seed):
    n = 25
    d = _random_spd(n, seed)
    b = np.random.default_rng(seed).standard_normal(n)
    xs = np.linalg.solve(d, b)
    a = SparseSym.from_dense(d)
    energies = []
    for k in range(1, n + 1):
        x, _ = cg_solve(a, b, maxit=k, tol=1e-300, backend=backend)
        e = x - xs
        energies.append(math.sqrt(e @ d @ e))
    assert all(b2 <= b1 * (1 + 1e-10) + 1e-13 for b1, b2 in zip(energies, energies[1:]))


def test_backends_give_same_cg_iterates():
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    d = _random_spd(40, 9)
    a = SparseSym.from_dense(d)
    b = np.ones(40)
    (x1, s1), (x2, s2) = (cg_solve(a, b, backend=k) for k in ("compiled", "python"))
    assert s1.iterations == s2.iterations
    np.testing.assert_allclose(x1, x2, rtol=1e-12)


def test_environment_forces_fallback():
    env = dict(os.environ, BRICK14_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import brick14.numerics as n; print(n.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
