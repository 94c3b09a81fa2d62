"""Floating-point kernels: quadrature, sparse storage, conjugate gradients."""
from ._backend import BACKENDS, DEFAULT as BACKEND
from .cg import SolverError, SolveStats, cg_solve
from .quadrature import QuadRule1D, QuadRuleND, cube_rule, gauss_rule, square_rule, tensor_rule
from .sparse import SparseSym

__all__ = [
    "BACKEND",
    "BACKENDS",
    "QuadRule1D",
    "QuadRuleND",
    "SolveStats",
    "SolverError",
    "SparseSym",
    "cg_solve",
    "cube_rule",
    "gauss_rule",
    "square_rule",
    "tensor_rule",
]
