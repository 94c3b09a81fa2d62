"""Dense linear algebra over :class:`fractions.Fraction`.

Matrices are lists of rows. Everything is exact; these routines are meant
for the small (at most 14 x 14) systems that arise on the reference cube.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

Matrix = List[List[Fraction]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def rref(a: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivots are taken leftmost-first, so free columns are the rightmost
    dependent ones. This makes null-space bases deterministic.
    """
    m = to_matrix(a)
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Sequence[Sequence]) -> int:
    return len(rref(a)[1]) if a else 0


def nullspace(a: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Basis of ``{v : a v = 0}``, one vector per free column (in column order)."""
    if not a:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    r, pivots = rref(a)
    n = len(r[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -r[row][fc]
        basis.append(v)
    return basis


def inverse(a: Sequence[Sequence]) -> Matrix:
    """Exact inverse; raises ``ZeroDivisionError`` when singular."""
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(to_matrix(a))]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]
