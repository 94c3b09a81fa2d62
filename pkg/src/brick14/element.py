"""The 14-node brick element family on the reference cube ``[-1, 1]^3``.

Every member is ``P2`` plus four augmenting polynomials, with DOFs at the
eight vertices and on the six faces (either the centroid value or the face
mean). Bases are obtained by exact inversion of the generalized Vandermonde
matrix, so one code path serves all types and both DOF kinds.

Node order is fixed: the eight vertices in lexicographic order of their
coordinates, ``(-1,-1,-1), (-1,-1,1), ..., (1,1,1)``, followed by the face
nodes ``x1-, x1+, x2-, x2+, x3-, x3+``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import exact
from .poly import (
    ONE,
    Poly2,
    Poly3,
    integrate_face,
    linear_combination,
    restrict_face,
    x1,
    x2,
    x3,
)

__all__ = [
    "ElementType",
    "DofKind",
    "ReferenceNode",
    "NODES",
    "ElementDef",
    "InadmissibleError",
    "FaceInterpSpace",
    "space_monomials",
    "dof_apply",
    "build_basis",
    "verify_closed_form_type1",
    "trace_space",
    "check_face_orthogonality",
    "face_interp_space",
    "face_interpolate",
    "check_opposite_face_identity",
    "rotation_basis",
    "rotation_interpolant",
]


class ElementType(enum.Enum):
    SK1 = "sk1"
    SK2 = "sk2"
    SK3 = "sk3"
    SK4 = "sk4"
    SK5 = "sk5"
    SK6 = "sk6"
    NEW = "new"

    @classmethod
    def parse(cls, s: "str | ElementType") -> "ElementType":
        if isinstance(s, cls):
            return s
        try:
            return cls(str(s).strip().lower())
        except ValueError:
            raise ValueError(f"unknown element type {s!r}") from None

    def __str__(self):
        return self.value


class DofKind(enum.Enum):
    FACE_CENTROID_VALUE = "centroid"
    FACE_INTEGRAL_AVERAGE = "integral"

    @classmethod
    def parse(cls, s: "str | DofKind") -> "DofKind":
        if isinstance(s, cls):
            return s
        try:
            return cls(str(s).strip().lower())
        except ValueError:
            raise ValueError(f"unknown DOF kind {s!r}") from None

    def __str__(self):
        return self.value


CENTROID = DofKind.FACE_CENTROID_VALUE
INTEGRAL = DofKind.FACE_INTEGRAL_AVERAGE

ADMISSIBLE_TYPES = (ElementType.SK1, ElementType.SK2, ElementType.SK5, ElementType.SK6, ElementType.NEW)


@dataclass(frozen=True)
class ReferenceNode:
    kind: str  # "vertex" or "face"
    coords: tuple

    @property
    def axis(self) -> int:
        """Normal axis (1..3) of a face node."""
        if self.kind != "face":
            raise AttributeError("vertex nodes have no face axis")
        return next(i + 1 for i, c in enumerate(self.coords) if c)

    @property
    def side(self) -> int:
        return self.coords[self.axis - 1]

    def __str__(self):
        tag = "V" if self.kind == "vertex" else "M"
        return f"{tag}({','.join(str(c) for c in self.coords)})"


VERTICES = tuple(ReferenceNode("vertex", c) for c in itertools.product((-1, 1), repeat=3))


def _face_node(axis: int, side: int) -> ReferenceNode:
    c = [0, 0, 0]
    c[axis - 1] = side
    return ReferenceNode("face", tuple(c))


FACES = tuple(_face_node(a, s) for a in (1, 2, 3) for s in (-1, 1))
NODES = VERTICES + FACES


def face_vertices(axis: int, side: int) -> tuple[ReferenceNode, ...]:
    """The four vertices of a reference face, in element node order."""
    return tuple(v for v in VERTICES if v.coords[axis - 1] == side)


def face_index(axis: int, side: int) -> int:
    """Position of the face node among the six face nodes."""
    return 2 * (axis - 1) + (0 if side < 0 else 1)


P2_MONOMIALS = (ONE, x1, x2, x3, x1**2, x2**2, x3**2, x1 * x2, x1 * x3, x2 * x3)

_HALF = Fraction(1, 2)
_AUGMENTERS = {
    ElementType.SK1: (x1 * x2 * x3, x1**2 * x2, x2**2 * x3, x3**2 * x1),
    ElementType.SK2: (x1 * x2 * x3, x1 * x2**2, x2 * x3**2, x3 * x1**2),
    ElementType.SK3: (x1 * x2 * x3, x1**3, x2**3, x3**3),
    ElementType.SK4: (x1 * x2 * x3, x1**2 * x2 * x3, x1 * x2**2 * x3, x1 * x2 * x3**2),
    ElementType.SK5: (
        x1 * x2 * x3,
        x1**2 * x2 + x1 * x2**2,
        x2**2 * x3 + x2 * x3**2,
        x3**2 * x1 + x3 * x1**2,
    ),
    ElementType.SK6: (x1 * x2 * x3, x1 * x2**2 * x3**2, x1**2 * x2 * x3**2, x1**2 * x2**2 * x3),
    ElementType.NEW: (
        x1 * x2 * x3,
        _HALF * x1 * (x2**2 + x3**2),
        _HALF * x2 * (x1**2 + x3**2),
        _HALF * x3 * (x1**2 + x2**2),
    ),
}


def space_monomials(t) -> tuple[Poly3, ...]:
    """The ten ``P2`` monomials followed by the four augmenting polynomials."""
    return P2_MONOMIALS + _AUGMENTERS[ElementType.parse(t)]


def dof_apply(kind, node: ReferenceNode, p: Poly3) -> Fraction:
    """Apply the DOF functional attached to ``node`` to ``p``."""
    kind = DofKind.parse(kind)
    if node.kind == "vertex" or kind is CENTROID:
        return p(node.coords)
    return integrate_face(restrict_face(p, node.axis, node.side)) / 4


class InadmissibleError(Exception):
    """The DOF functionals are not unisolvent on the element space.

    ``kernel`` holds a basis of the polynomials in the space on which every
    DOF vanishes.
    """

    def __init__(self, element_type, dof_kind, kernel: Sequence[Poly3]):
        self.element_type = element_type
        self.dof_kind = dof_kind
        self.kernel = tuple(kernel)
        shown = ", ".join(str(k) for k in self.kernel)
        super().__init__(
            f"{element_type}/{dof_kind} is inadmissible: DOFs vanish on span{{{shown}}}"
        )


@dataclass(frozen=True)
class ElementDef:
    element_type: ElementType
    dof_kind: DofKind
    monomials: tuple
    basis: tuple
    nodes: tuple = NODES
    # basis[k] = sum_j coefficients[j][k] * monomials[j]
    coefficients: tuple = field(default=(), repr=False)

    def dof_vector(self, p: Poly3) -> list[Fraction]:
        return [dof_apply(self.dof_kind, n, p) for n in self.nodes]

    def interpolate(self, p: Poly3) -> Poly3:
        """The element interpolant of an exact polynomial."""
        return linear_combination(self.dof_vector(p), self.basis)

    def __str__(self):
        return f"{self.element_type}/{self.dof_kind}"


def dof_matrix(t, kind) -> exact.Matrix:
    """``G[i][j] = dof_i(monomial_j)``."""
    mons = space_monomials(t)
    return [[dof_apply(kind, n, m) for m in mons] for n in NODES]


@lru_cache(maxsize=None)
def build_basis(t, kind=CENTROID) -> ElementDef:
    """Exact nodal basis for ``(t, kind)``.

    Raises
    ------
    InadmissibleError
        If the generalized Vandermonde matrix is singular. The exception
        carries the kernel of the DOF map as polynomials.
    """
    t = ElementType.parse(t)
    kind = DofKind.parse(kind)
    mons = space_monomials(t)
    g = dof_matrix(t, kind)
    try:
        c = exact.inverse(g)
    except ZeroDivisionError:
        kernel = [linear_combination(v, mons) for v in exact.nullspace(g)]
        raise InadmissibleError(t, kind, kernel) from None
    basis = tuple(linear_combination([c[j][k] for j in range(14)], mons) for k in range(14))
    return ElementDef(t, kind, mons, basis, NODES, tuple(tuple(row) for row in c))


def is_admissible(t, kind=CENTROID) -> bool:
    try:
        build_basis(t, kind)
    except InadmissibleError:
        return False
    return True


# -- closed-form Type 1 basis -------------------------------------------------

_R1_SK1 = (x1 * x3**2, x2 * x1**2, x3 * x2**2)


def _closed_vertex(j, k, l, weighted: bool) -> Poly3:
    r1, r2, r3 = _R1_SK1
    r = j * r1 + k * r2 + l * r3 if weighted else r1 + r2 + r3
    quad = Fraction(1, 16) * (-1 + x1**2 + x2**2 + x3**2)
    rest = j * k * x1 * x2 + j * l * x1 * x3 + k * l * x2 * x3 + j * k * l * (x1 * x2 * x3) + r
    return quad + Fraction(1, 8) * rest


def _closed_face(j, k, l, squared: bool) -> Poly3:
    r1, r2, r3 = _R1_SK1
    lin = j * x1 + k * x2 + l * x3
    wj, wk, wl = (j * j, k * k, l * l) if squared else (j, k, l)
    q = -(x1**2 + x2**2 + x3**2) + 2 * (wj * x1**2 + wk * x2**2 + wl * x3**2)
    r = j * r1 + k * r2 + l * r3
    return Fraction(1, 4) + _HALF * lin + Fraction(1, 4) * q - _HALF * r


# (vertex cubic term reading, face quadratic term reading)
CLOSED_FORM_READINGS = (
    ("weighted", "signed"),
    ("weighted", "squared"),
    ("unweighted", "signed"),
    ("unweighted", "squared"),
)


def closed_form_type1(vertex_reading: str = "weighted", face_reading: str = "signed") -> tuple[Poly3, ...]:
    """Closed-form SK1 basis in node order, under one reading of the formulas.

    ``vertex_reading="weighted"`` carries the vertex signs on the cubic term
    (``j r1 + k r2 + l r3``); ``"unweighted"`` uses ``r1 + r2 + r3``.
    ``face_reading="signed"`` takes the face quadratic term literally as
    ``2(j x1^2 + k x2^2 + l x3^2)``; ``"squared"`` uses ``j^2, k^2, l^2``.
    """
    if vertex_reading not in ("weighted", "unweighted") or face_reading not in ("signed", "squared"):
        raise ValueError("unknown closed-form reading")
    verts = tuple(_closed_vertex(*v.coords, vertex_reading == "weighted") for v in VERTICES)
    faces = tuple(_closed_face(*f.coords, face_reading == "squared") for f in FACES)
    return verts + faces


@dataclass
class ClosedFormReport:
    matches: dict  # reading -> list of 14 booleans
    kronecker: dict  # reading -> bool
    consistent_reading: tuple | None

    @property
    def passed(self) -> bool:
        return self.consistent_reading is not None

    def mismatched(self, reading) -> list[str]:
        return [str(NODES[i]) for i, ok in enumerate(self.matches[tuple(reading)]) if not ok]


def verify_closed_form_type1() -> ClosedFormReport:
    """Compare every reading of the closed-form SK1 basis with the exact-solve basis."""
    ref = build_basis(ElementType.SK1, CENTROID)
    matches, kron = {}, {}
    for reading in CLOSED_FORM_READINGS:
        cf = closed_form_type1(*reading)
        matches[reading] = [a == b for a, b in zip(cf, ref.basis)]
        kron[reading] = all(
            dof_apply(CENTROID, n, phi) == (1 if i == j else 0)
            for j, phi in enumerate(cf)
            for i, n in enumerate(NODES)
        )
    good = next((r for r in CLOSED_FORM_READINGS if kron[r] and all(matches[r])), None)
    return ClosedFormReport(matches, kron, good)


# -- traces and face orthogonality --------------------------------------------


def _poly2_rows(polys: Sequence[Poly2]) -> tuple[list, list]:
    exps = sorted({e for p in polys for e in p.terms}, key=lambda e: (sum(e), e))
    return [[p.coefficient(e) for e in exps] for p in polys], exps


def poly2_rank(polys: Sequence[Poly2]) -> int:
    polys = [p for p in polys]
    if not any(polys):
        return 0
    rows, _ = _poly2_rows(polys)
    return exact.rank(rows)


def in_span(polys: Sequence[Poly2], q: Poly2) -> bool:
    return poly2_rank(list(polys) + [q]) == poly2_rank(polys)


def _leading_key(p: Poly2):
    e = max(p.terms, key=lambda e: (sum(e), tuple(-k for k in e)))
    return (sum(e), tuple(-k for k in e))


def trace_space(t, axis: int, side: int) -> list[Poly2]:
    """Maximal independent subset of the face traces of the space monomials."""
    keep: list[Poly2] = []
    for m in space_monomials(t):
        q = restrict_face(m, axis, side)
        if q and poly2_rank(keep + [q]) > len(keep):
            keep.append(q)
    return sorted(keep, key=_leading_key)


@dataclass
class FaceVerdict:
    axis: int
    side: int
    holds: bool
    witness: Poly3 | None = None
    integral: Fraction | None = None

    @property
    def label(self) -> str:
        return f"x{self.axis}{'+' if self.side > 0 else '-'}"


def check_face_orthogonality(t, kind=CENTROID) -> list[FaceVerdict]:
    """Does every ``p`` vanishing on a face's DOFs have zero face integral?

    The constrained subspace is the kernel of the five face functionals
    (four vertex values and the face DOF). Its basis is integrated exactly;
    the first basis member with a nonzero integral is the witness.
    """
    t = ElementType.parse(t)
    kind = DofKind.parse(kind)
    build_basis(t, kind)
    mons = space_monomials(t)
    out = []
    for fnode in FACES:
        a, s = fnode.axis, fnode.side
        funcs = list(face_vertices(a, s)) + [fnode]
        rows = [[dof_apply(kind, n, m) for m in mons] for n in funcs]
        verdict = FaceVerdict(a, s, True)
        for v in exact.nullspace(rows):
            p = linear_combination(v, mons)
            val = integrate_face(restrict_face(p, a, s))
            if val != 0:
                verdict = FaceVerdict(a, s, False, p, val)
                break
        out.append(verdict)
    return out


# -- face interpolation -------------------------------------------------------


def _face_vars(axis: int) -> tuple[int, int]:
    return tuple(i for i in (1, 2, 3) if i != axis)


def _pvar(axis: int, var: int, side: int = 1) -> Poly2:
    """Face variable ``x_var`` as a :class:`Poly2` on faces normal to ``axis``."""
    a, b = _face_vars(axis)
    e = (1, 0) if var == a else (0, 1)
    return Poly2({e: 1}, axis, side)


def _enrichment(t: ElementType, axis: int, side: int) -> Poly2:
    a, b = _face_vars(axis)
    ya, yb = _pvar(axis, a, side), _pvar(axis, b, side)
    # the square whose variable index follows/precedes the normal axis cyclically
    nxt = {1: 3, 2: 1, 3: 2}[axis]
    prv = {1: 2, 2: 3, 3: 1}[axis]
    sq = {a: ya * ya, b: yb * yb}
    if t is ElementType.SK1:
        return sq[nxt]
    if t is ElementType.SK2:
        return sq[prv]
    if t in (ElementType.SK5, ElementType.NEW):
        return ya * ya + yb * yb
    if t is ElementType.SK6:
        return ya * ya * yb * yb
    raise ValueError(f"no face interpolation space for inadmissible type {t}")


@dataclass(frozen=True)
class FaceInterpSpace:
    """Five-dimensional enriched bilinear space on one reference face.

    ``nodal`` is dual to the point values at the four face vertices (element
    node order) and the centroid.
    """

    element_type: ElementType
    axis: int
    side: int
    span: tuple
    bubble: Poly2
    nodal: tuple

    @property
    def points(self) -> tuple:
        return tuple(_face_points(self.axis, self.side))


def _face_points(axis: int, side: int) -> list[tuple]:
    a, b = _face_vars(axis)
    pts = [(v.coords[a - 1], v.coords[b - 1]) for v in face_vertices(axis, side)]
    return pts + [(0, 0)]


def face_interp_space(t, axis: int, side: int = 1) -> FaceInterpSpace:
    """The enriched bilinear face space assigned to element type ``t``."""
    t = ElementType.parse(t)
    a, b = _face_vars(axis)
    ya, yb = _pvar(axis, a, side), _pvar(axis, b, side)
    one = Poly2({(0, 0): 1}, axis, side)
    span = (one, ya, yb, ya * yb, _enrichment(t, axis, side))
    pts = _face_points(axis, side)
    g = [[p(pt) for p in span] for pt in pts]
    try:
        c = exact.inverse(g)
    except ZeroDivisionError:
        raise ValueError(f"face functionals not unisolvent for {t} axis {axis}") from None
    bubble = linear_combination([c[j][4] for j in range(5)], span)
    # bilinear nodal functions q_j on the four face vertices
    nodal = []
    for sa, sb in pts[:4]:
        q = (one + ya * sa) * (one + yb * sb) / 4
        nodal.append(q - bubble * q((0, 0)))
    nodal.append(bubble)
    return FaceInterpSpace(t, axis, side, span, bubble, tuple(nodal))


def face_interpolate(space: FaceInterpSpace, values: Sequence) -> Poly2:
    """Member of ``space`` with the given values at the face vertices and centroid."""
    if len(values) != 5:
        raise ValueError("five face values required (four vertices then centroid)")
    return linear_combination([Fraction(v) for v in values], space.nodal)


def interpolate_trace(space: FaceInterpSpace, q: Poly2) -> Poly2:
    return face_interpolate(space, [q(pt) for pt in _face_points(space.axis, space.side)])


@dataclass
class OppositeFaceReport:
    element_type: ElementType
    # axis -> list of (basis index, residual +, residual -, holds)
    rows: dict

    def holds_on_axis(self, axis: int) -> bool:
        return all(r[3] for r in self.rows[axis])

    @property
    def holds(self) -> bool:
        return all(self.holds_on_axis(a) for a in self.rows)

    def failures(self) -> list:
        return [(a, r) for a in self.rows for r in self.rows[a] if not r[3]]


def check_opposite_face_identity(t, kind=CENTROID) -> OppositeFaceReport:
    """``w|+ - I+(w|+) == w|- - I-(w|-)`` for every basis ``w`` and axis."""
    t = ElementType.parse(t)
    e = build_basis(t, kind)
    rows = {}
    for axis in (1, 2, 3):
        sp = face_interp_space(t, axis, 1)
        sm = face_interp_space(t, axis, -1)
        res = []
        for i, w in enumerate(e.basis):
            wp, wm = restrict_face(w, axis, 1), restrict_face(w, axis, -1)
            rp = wp - interpolate_trace(sp, wp)
            rm = wm - interpolate_trace(sm, wm)
            res.append((i, rp, rm, rp.terms == rm.terms))
        rows[axis] = res
    return OppositeFaceReport(t, rows)


# -- rotation element ---------------------------------------------------------


@lru_cache(maxsize=None)
def rotation_basis() -> tuple[Poly3, ...]:
    """Nodal basis of ``span{1, x1, x2, x3, x1^2 - x2^2, x1^2 - x3^2}``.

    Ordered like the face nodes: ``x1-, x1+, x2-, x2+, x3-, x3+``.
    """
    xs = (x1, x2, x3)
    out = []
    for i in range(3):
        tail = ONE
        for j in range(3):
            if j != i:
                tail = tail + xs[i] ** 2 - xs[j] ** 2
        out.append((tail - 3 * xs[i]) / 6)
        out.append((tail + 3 * xs[i]) / 6)
    return tuple(out)


def rotation_interpolant(centroid_values: Sequence) -> Poly3:
    """``sum_i v_i psi_i`` with values given in face-node order."""
    if len(centroid_values) != 6:
        raise ValueError("six centroid values required")
    return linear_combination([Fraction(v) for v in centroid_values], rotation_basis())
