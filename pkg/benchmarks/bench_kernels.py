"""Compare the compiled kernels with the numpy fallback.

Run:  python benchmarks/bench_kernels.py [--cells 16] [--repeat 5]

Times CSR construction from the assembly triplet pattern, one matrix-vector
product and a Jacobi-preconditioned CG solve of the reduced SK1 system with
a random right-hand side (a smooth load converges in a handful of steps and
would mostly time the setup).
"""
import argparse
import timeit

import numpy as np

from brick14.element import build_basis
from brick14.fem import apply_dirichlet, assemble, get_solution
from brick14.mesh import build_mesh, enumerate_dofs
from brick14.numerics import BACKENDS, SparseSym, cg_solve


def problem(n, rng):
    m = build_mesh(cells=(n, n, n))
    e = build_basis("sk1")
    d = enumerate_dofs(m, e.dof_kind)
    sol = get_solution("trig")
    system = apply_dirichlet(assemble(m, d, e, sol.f), d, sol.u)
    rows = np.repeat(d.cell_dofs, 14, axis=1).ravel()
    cols = np.tile(d.cell_dofs, (1, 14)).ravel()
    return d.n_dofs, rows, cols, rng.standard_normal(rows.size), system


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cells", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    n, rows, cols, vals, system = problem(args.cells, rng)
    a = system.matrix
    x = rng.standard_normal(a.n)
    print(f"mesh {args.cells}^3: {n} dofs, {rows.size} triplets, reduced n={a.n} nnz={a.nnz}")
    print(f"{'kernel':<12} " + " ".join(f"{b:>12}" for b in BACKENDS))
    results = {}
    for name, fn in (
        ("coo_to_csr", lambda b: SparseSym.from_triplets(n, rows, cols, vals, backend=b)),
        ("matvec", lambda b: a.matvec(x, backend=b)),
        ("cg", lambda b: cg_solve(a, x, backend=b)),
    ):
        times = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) for b in BACKENDS}
        results[name] = times
        print(f"{name:<12} " + " ".join(f"{times[b] * 1e3:>10.2f}ms" for b in BACKENDS))
    if len(BACKENDS) > 1:
        for name, t in results.items():
            print(f"speedup {name}: {t['python'] / t['compiled']:.1f}x")


if __name__ == "__main__":
    main()
