"""Gauss-Legendre rules on ``[-1, 1]`` and their tensor products."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_POINTS = 16


@dataclass(frozen=True)
class QuadRule1D:
    """n-point Gauss-Legendre rule, exact for degree ``2n - 1``."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.size


@dataclass(frozen=True)
class QuadRuleND:
    """Tensor-product rule; ``points`` has shape ``(npts, dim)``."""

    points: np.ndarray
    weights: np.ndarray
    n1d: int

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _legendre(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_n(x) and P_n'(x) by the three-term recurrence."""
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def _gauss(n: int) -> tuple[tuple, tuple]:
    if n == 1:
        return (0.0,), (2.0,)
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    _, dp = _legendre(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce exact symmetry about 0
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    if n % 2:
        x[n // 2] = 0.0
    return tuple(x), tuple(w)


def gauss_rule(n: int) -> QuadRule1D:
    """Gauss-Legendre nodes and weights by Newton iteration on ``P_n``."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_POINTS:
        raise ValueError(f"number of points must be an integer in [1, {MAX_POINTS}], got {n!r}")
    x, w = _gauss(int(n))
    return QuadRule1D(np.array(x), np.array(w))


def tensor_rule(n: int, dim: int) -> QuadRuleND:
    """``dim``-fold tensor product of the n-point rule, last axis fastest."""
    r = gauss_rule(n)
    grids = np.meshgrid(*([r.nodes] * dim), indexing="ij")
    wgrids = np.meshgrid(*([r.weights] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return QuadRuleND(pts, w, r.n)


def cube_rule(n: int) -> QuadRuleND:
    return tensor_rule(n, 3)


def square_rule(n: int) -> QuadRuleND:
    return tensor_rule(n, 2)
