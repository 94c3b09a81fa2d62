"""Independent symbolic oracles built directly on sympy.

Nothing here imports the package's own polynomial arithmetic, so agreement
with these functions is evidence rather than tautology.
"""
import itertools
from fractions import Fraction

import sympy as sp

X = sp.symbols("x1 x2 x3")
x1s, x2s, x3s = X

VERTS = list(itertools.product((-1, 1), repeat=3))
FACES = [(a, s) for a in (1, 2, 3) for s in (-1, 1)]

_P2 = [sp.Integer(1), x1s, x2s, x3s, x1s**2, x2s**2, x3s**2, x1s * x2s, x1s * x3s, x2s * x3s]
_EXTRA = {
    "sk1": [x1s * x2s * x3s, x1s**2 * x2s, x2s**2 * x3s, x3s**2 * x1s],
    "sk2": [x1s * x2s * x3s, x1s * x2s**2, x2s * x3s**2, x3s * x1s**2],
    "sk3": [x1s * x2s * x3s, x1s**3, x2s**3, x3s**3],
    "sk4": [x1s * x2s * x3s, x1s**2 * x2s * x3s, x1s * x2s**2 * x3s, x1s * x2s * x3s**2],
    "sk5": [x1s * x2s * x3s, x1s**2 * x2s + x1s * x2s**2, x2s**2 * x3s + x2s * x3s**2, x3s**2 * x1s + x3s * x1s**2],
    "sk6": [x1s * x2s * x3s, x1s * x2s**2 * x3s**2, x1s**2 * x2s * x3s**2, x1s**2 * x2s**2 * x3s],
    "new": [x1s * x2s * x3s, x1s * (x2s**2 + x3s**2), x2s * (x3s**2 + x1s**2), x3s * (x1s**2 + x2s**2)],
}


def space(t):
    return _P2 + _EXTRA[t]


def to_sympy(p):
    return sum((sp.Rational(c.numerator, c.denominator) * x1s ** e[0] * x2s ** e[1] * x3s ** e[2]
                for e, c in p.terms.items()), sp.Integer(0))


def frac(v) -> Fraction:
    v = sp.nsimplify(v)
    return Fraction(int(v.p), int(v.q))


def face_mean(expr, axis, side):
    k = axis - 1
    restricted = expr.subs(X[k], side)
    rest = [X[i] for i in range(3) if i != k]
    poly = sp.Poly(sp.expand(restricted), *rest)
    # ∫_{-1}^{1} t^e dt = 2/(e+1) for even e, 0 for odd e
    mom = lambda e: sp.Rational(2, e + 1) if e % 2 == 0 else 0  # noqa: E731
    total = sum((c * mom(ea) * mom(eb) for (ea, eb), c in poly.terms()), sp.Integer(0))
    return total / 4


def face_integral(expr, axis, side):
    return 4 * face_mean(expr, axis, side)


def face_point(axis, side):
    c = [0, 0, 0]
    c[axis - 1] = side
    return tuple(c)


def dofs(expr, kind):
    """Vertex values then face functionals in node order."""
    vals = [expr.subs(dict(zip(X, v))) for v in VERTS]
    for a, s in FACES:
        if kind == "centroid":
            vals.append(expr.subs(dict(zip(X, face_point(a, s)))))
        else:
            vals.append(face_mean(expr, a, s))
    return vals


def in_span(expr, gens) -> bool:
    polys = [sp.Poly(g, *X) for g in gens]
    monos = sorted({m for p in polys + [sp.Poly(expr, *X)] for m in p.monoms()})
    rows = [[p.coeff_monomial(m) for m in monos] for p in polys]
    a = sp.Matrix(rows)
    b = sp.Matrix(rows + [[sp.Poly(expr, *X).coeff_monomial(m) for m in monos]])
    return a.rank() == b.rank()


def closed_form_sk1(face_term_squared: bool):
    """Type 1 basis from the printed closed-form formulas."""
    r0 = x1s * x2s * x3s
    r1, r2, r3 = x1s * x3s**2, x2s * x1s**2, x3s * x2s**2
    out = []
    for j, k, l in VERTS:
        r = j * r1 + k * r2 + l * r3
        out.append(sp.Rational(1, 16) * (-1 + x1s**2 + x2s**2 + x3s**2)
                   + sp.Rational(1, 8) * (j * k * x1s * x2s + j * l * x1s * x3s + k * l * x2s * x3s + j * k * l * r0 + r))
    for a, s in FACES:
        j, k, l = face_point(a, s)
        ell = j * x1s + k * x2s + l * x3s
        wj, wk, wl = (j * j, k * k, l * l) if face_term_squared else (j, k, l)
        q = -(x1s**2 + x2s**2 + x3s**2) + 2 * (wj * x1s**2 + wk * x2s**2 + wl * x3s**2)
        r = j * r1 + k * r2 + l * r3
        out.append(sp.Rational(1, 4) + ell / 2 + q / 4 - r / 2)
    return [sp.expand(p) for p in out]
