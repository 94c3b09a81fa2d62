"""Exact 14-node nonconforming brick elements and a Poisson solver built on them."""
from .element import (
    CENTROID,
    INTEGRAL,
    DofKind,
    ElementDef,
    ElementType,
    InadmissibleError,
    build_basis,
    check_face_orthogonality,
    check_opposite_face_identity,
)
from .fem import ErrorPair, consistency_functional, error_norms, interpolate, solve_poisson
from .mesh import BoxMesh, build_mesh, enumerate_dofs
from .numerics import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoxMesh",
    "CENTROID",
    "DofKind",
    "ElementDef",
    "ElementType",
    "ErrorPair",
    "INTEGRAL",
    "InadmissibleError",
    "build_basis",
    "build_mesh",
    "check_face_orthogonality",
    "check_opposite_face_identity",
    "consistency_functional",
    "enumerate_dofs",
    "error_norms",
    "interpolate",
    "solve_poisson",
]
