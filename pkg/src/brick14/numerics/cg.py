"""Preconditioned conjugate gradients on :class:`SparseSym` systems."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _backend
from .sparse import SparseSym

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class SolveStats:
    iterations: int
    residual: float
    converged: bool
    tolerance: float


class SolverError(RuntimeError):
    """CG failed to reach the requested tolerance."""

    def __init__(self, stats: SolveStats):
        self.stats = stats
        super().__init__(
            f"CG did not converge: residual {stats.residual:.3e} > {stats.tolerance:.1e} "
            f"after {stats.iterations} iterations"
        )


def cg_solve(
    a: SparseSym,
    b,
    tol: float = DEFAULT_TOL,
    maxit: int | None = None,
    precond: str | None = "diagonal",
    x0=None,
    backend: str | None = None,
):
    """Solve ``a x = b`` for SPD ``a``.

    Stops when the true relative residual ``|b - a x| / |b|`` is at most
    ``tol``. Non-convergence is reported in the returned stats, not raised.

    Returns
    -------
    x : ndarray
    stats : SolveStats
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    if b.shape != (a.n,):
        raise ValueError(f"right-hand side has shape {b.shape}, expected ({a.n},)")
    if maxit is None:
        maxit = 10 * max(a.n, 1)
    if precond == "diagonal":
        d = a.diagonal()
        if np.any(d <= 0):
            raise ValueError("diagonal preconditioner needs a positive diagonal")
        minv = 1.0 / d
    elif precond in (None, "none"):
        minv = np.ones(a.n)
    else:
        raise ValueError(f"unknown preconditioner {precond!r}")
    x0 = np.zeros(a.n) if x0 is None else np.ascontiguousarray(x0, dtype=np.float64)
    k = _backend.get(backend)
    x, it, res = k.pcg(a.indptr, a.indices, a.data, b, x0, minv, float(tol), int(maxit))
    stats = SolveStats(int(it), float(res), bool(res <= tol), float(tol))
    log.debug("cg: n=%d iterations=%d residual=%.3e", a.n, it, res)
    return np.asarray(x), stats
