"""Exact certificates for every (element type, DOF kind) pair.

Each row records what was observed and compares it against a table of
expected outcomes. A row whose observation differs from the table is a
mismatch; the command line maps any mismatch to a distinct exit status.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .element import (
    CENTROID,
    DofKind,
    ElementType,
    InadmissibleError,
    build_basis,
    check_face_orthogonality,
    check_opposite_face_identity,
    trace_space,
    verify_closed_form_type1,
)

SK_TYPES = tuple(ElementType(f"sk{i}") for i in range(1, 7))
ALL_TYPES = SK_TYPES + (ElementType.NEW,)


@dataclass(frozen=True)
class Expectation:
    admissible: bool
    face_orthogonality: bool | None = None
    opposite_face: bool | None = None


def expected(t, kind) -> Expectation:
    t, kind = ElementType.parse(t), DofKind.parse(kind)
    if t in (ElementType.SK3, ElementType.SK4):
        return Expectation(False)
    ortho = not (t is ElementType.SK6 and kind is CENTROID)
    return Expectation(True, ortho, True)


@dataclass
class CertificateRow:
    element_type: ElementType
    dof_kind: DofKind
    admissible: bool
    kernel: tuple = ()
    faces: list = field(default_factory=list)  # FaceVerdict per face
    axes: dict = field(default_factory=dict)  # axis -> bool
    trace_dims: tuple = ()
    closed_form: object = None
    expectation: Expectation | None = None

    @property
    def face_orthogonality(self) -> bool | None:
        return all(f.holds for f in self.faces) if self.admissible else None

    @property
    def opposite_face(self) -> bool | None:
        return all(self.axes.values()) if self.admissible else None

    def mismatches(self) -> list[str]:
        exp = self.expectation
        out = []
        if self.admissible != exp.admissible:
            out.append("admissibility")
        if exp.admissible and self.admissible:
            if self.face_orthogonality != exp.face_orthogonality:
                out.append("face orthogonality")
            if self.opposite_face != exp.opposite_face:
                out.append("opposite-face identity")
        if self.closed_form is not None and not self.closed_form.passed:
            out.append("closed form")
        return out

    @property
    def ok(self) -> bool:
        return not self.mismatches()

    def witness_integrals(self) -> dict[str, Fraction]:
        return {f.label: f.integral for f in self.faces if not f.holds}

    def lines(self) -> list[str]:
        head = f"{self.element_type}/{self.dof_kind}"
        status = "ok" if self.ok else "MISMATCH: " + ", ".join(self.mismatches())
        if not self.admissible:
            ker = "; ".join(str(k) for k in self.kernel)
            return [f"{head}: inadmissible, kernel {{{ker}}} [{status}]"]
        faces = " ".join(f"{f.label}:{'PASS' if f.holds else 'FAIL'}" for f in self.faces)
        axes = " ".join(f"x{a}:{'PASS' if ok else 'FAIL'}" for a, ok in self.axes.items())
        out = [
            f"{head}: admissible [{status}]",
            f"  face orthogonality  {faces}",
            f"  opposite-face       {axes}",
            f"  trace dims          {' '.join(str(d) for d in self.trace_dims)}",
        ]
        for f in self.faces:
            if not f.holds:
                out.append(f"  witness on {f.label}: {f.witness}  face integral = {f.integral}")
        if self.closed_form is not None:
            cf = self.closed_form
            reading = "/".join(cf.consistent_reading) if cf.passed else "none"
            out.append(f"  closed form         consistent reading {reading}")
            for r, good in cf.kronecker.items():
                if not good:
                    miss = ", ".join(cf.mismatched(r))
                    out.append(f"    reading {'/'.join(r)} differs at {miss}")
        return out


def certify(t, kind) -> CertificateRow:
    t, kind = ElementType.parse(t), DofKind.parse(kind)
    row = CertificateRow(t, kind, True, expectation=expected(t, kind))
    try:
        build_basis(t, kind)
    except InadmissibleError as exc:
        row.admissible = False
        row.kernel = exc.kernel
        return row
    row.faces = check_face_orthogonality(t, kind)
    rep = check_opposite_face_identity(t, kind)
    row.axes = {a: rep.holds_on_axis(a) for a in (1, 2, 3)}
    row.trace_dims = tuple(len(trace_space(t, a, s)) for a in (1, 2, 3) for s in (-1, 1))
    if t is ElementType.SK1 and kind is CENTROID:
        row.closed_form = verify_closed_form_type1()
    return row


@dataclass
class VerificationReport:
    rows: list[CertificateRow]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def render(self) -> str:
        lines = []
        for r in self.rows:
            lines.extend(r.lines())
        bad = sum(not r.ok for r in self.rows)
        lines.append(f"{len(self.rows)} rows, {bad} mismatch{'es' if bad != 1 else ''}")
        return "\n".join(lines)


def run_verification(types=SK_TYPES, kinds=(CENTROID, DofKind.FACE_INTEGRAL_AVERAGE)) -> VerificationReport:
    return VerificationReport([certify(t, k) for t in types for k in kinds])
