"""Exact trivariate and face-bivariate polynomials over the rationals.

Polynomials are stored sparsely as a mapping from exponent tuples to
:class:`fractions.Fraction` coefficients. Values are immutable and hashable.

Examples
--------
>>> from brick14.poly import x1, x2, x3
>>> p = x1 * x2**2 * x3**2 - x2**2
>>> p.restrict(1, +1)
Poly2(axis=1, side=1, '-x2^2 + x2^2*x3^2')
>>> integrate_face(p.restrict(1, +1))
Fraction(-8, 9)
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _Rational
from typing import Iterable, Mapping, Sequence

Rational = Fraction

_VARS = ("x1", "x2", "x3")


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, _Rational)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"exact rational expected, got {type(v).__name__}")


def _normalize(terms: Mapping[tuple, object]) -> dict:
    out = {}
    for e, c in terms.items():
        c = _frac(c)
        if c != 0:
            out[tuple(int(k) for k in e)] = c
    return out


def _grlex_key(e: tuple) -> tuple:
    # ascending total degree, then x1-heavy monomials first within a degree
    return (sum(e), tuple(-k for k in e))


def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render(terms: Mapping[tuple, Fraction], names: Sequence[str]) -> str:
    if not terms:
        return "0"
    pieces = []
    for e in sorted(terms, key=_grlex_key):
        c = terms[e]
        mono = "*".join(
            n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
        )
        mag = abs(c)
        if not mono:
            body = _fmt_coef(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_coef(mag)}*{mono}"
        pieces.append((c < 0, body))
    neg, body = pieces[0]
    out = ("-" if neg else "") + body
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


class _PolyBase:
    __slots__ = ("_terms", "_hash")
    nvars = 0

    def _new(self, terms):
        raise NotImplementedError

    @property
    def terms(self) -> dict:
        """Copy of the exponent -> coefficient map."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, exponents: tuple) -> Fraction:
        return self._terms.get(tuple(exponents), Fraction(0))

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, (int, _Rational)):
            return self._new({(0,) * self.nvars: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        self._check_compatible(other)
        t = dict(self._terms)
        for e, c in other._terms.items():
            t[e] = t.get(e, 0) + c
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, _Rational)):
            c = _frac(other)
            return self._new({e: c * v for e, v in self._terms.items()})
        if not isinstance(other, type(self)):
            return NotImplemented
        self._check_compatible(other)
        t: dict = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                e = tuple(a + b for a, b in zip(ea, eb))
                t[e] = t.get(e, 0) + ca * cb
        return self._new(t)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, _Rational)):
            return self * (Fraction(1) / _frac(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("non-negative integer power required")
        out = self._new({(0,) * self.nvars: 1})
        for _ in range(n):
            out = out * self
        return out

    def _check_compatible(self, other):
        pass

    def __bool__(self):
        return bool(self._terms)


class Poly3(_PolyBase):
    """Polynomial in x1, x2, x3 with rational coefficients."""

    __slots__ = ()
    nvars = 3

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        t = _normalize(terms or {})
        for e in t:
            if len(e) != 3 or min(e) < 0:
                raise ValueError(f"bad exponent triple {e}")
        self._terms = t
        self._hash = None

    def _new(self, terms):
        return Poly3(terms)

    @classmethod
    def constant(cls, c) -> "Poly3":
        return cls({(0, 0, 0): c})

    @classmethod
    def monomial(cls, e1: int, e2: int, e3: int, coef=1) -> "Poly3":
        return cls({(e1, e2, e3): coef})

    def __call__(self, x: Sequence) -> Fraction:
        return evaluate(self, x)

    def derivative(self, axis: int) -> "Poly3":
        return derivative(self, axis)

    def restrict(self, axis: int, side) -> "Poly2":
        return restrict_face(self, axis, side)

    def integrate_box(self, lo=(-1, -1, -1), hi=(1, 1, 1)) -> Fraction:
        return integrate_box(self, lo, hi)

    def __eq__(self, other):
        if isinstance(other, (int, _Rational)):
            other = Poly3.constant(other)
        if not isinstance(other, Poly3):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("Poly3", frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        return _render(self._terms, _VARS)

    def __repr__(self):
        return f"Poly3('{self}')"


class Poly2(_PolyBase):
    """Trace of a :class:`Poly3` on the reference face ``x_axis = side``.

    Exponent pairs refer to the two remaining variables in increasing index
    order, e.g. ``(x2, x3)`` for ``axis=1``.
    """

    __slots__ = ("axis", "side")
    nvars = 2

    def __init__(self, terms: Mapping[tuple, object] | None = None, axis: int = 1, side: int = 1):
        if axis not in (1, 2, 3):
            raise ValueError("axis must be 1, 2 or 3")
        if side not in (1, -1):
            raise ValueError("side must be +1 or -1")
        t = _normalize(terms or {})
        for e in t:
            if len(e) != 2 or min(e) < 0:
                raise ValueError(f"bad exponent pair {e}")
        self._terms = t
        self._hash = None
        self.axis = axis
        self.side = side

    def _new(self, terms):
        return Poly2(terms, self.axis, self.side)

    def _check_compatible(self, other):
        if other.axis != self.axis:
            raise ValueError("face polynomials live on faces of different orientation")

    @property
    def variables(self) -> tuple:
        return tuple(v for i, v in enumerate(_VARS, start=1) if i != self.axis)

    def on_side(self, side: int) -> "Poly2":
        """Same coefficients, relabelled onto the opposite (or same) face."""
        return Poly2(self._terms, self.axis, side)

    def __call__(self, y: Sequence) -> Fraction:
        a, b = (_frac(v) for v in y)
        return sum((c * a ** e[0] * b ** e[1] for e, c in self._terms.items()), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, (int, _Rational)):
            return self._terms == _normalize({(0, 0): other})
        if not isinstance(other, Poly2):
            return NotImplemented
        return (self.axis, self.side, self._terms) == (other.axis, other.side, other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("Poly2", self.axis, self.side, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        return _render(self._terms, self.variables)

    def __repr__(self):
        return f"Poly2(axis={self.axis}, side={self.side}, '{self}')"


x1 = Poly3.monomial(1, 0, 0)
x2 = Poly3.monomial(0, 1, 0)
x3 = Poly3.monomial(0, 0, 1)
ONE = Poly3.constant(1)
ZERO = Poly3()


def evaluate(p: Poly3, x: Sequence) -> Fraction:
    """Exact value of ``p`` at the point ``x``."""
    a, b, c = (_frac(v) for v in x)
    total = Fraction(0)
    for (e1, e2, e3), coef in p.items():
        total += coef * a ** e1 * b ** e2 * c ** e3
    return total


def derivative(p: Poly3, axis: int) -> Poly3:
    """Partial derivative with respect to ``x_axis`` (axis in 1..3)."""
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    k = axis - 1
    out = {}
    for e, c in p.items():
        if e[k]:
            f = list(e)
            f[k] -= 1
            out[tuple(f)] = c * e[k]
    return Poly3(out)


def _moment(e: int, lo: Fraction, hi: Fraction) -> Fraction:
    return (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)


def integrate_box(p: Poly3, lo: Sequence = (-1, -1, -1), hi: Sequence = (1, 1, 1)) -> Fraction:
    """Exact integral of ``p`` over the box ``[lo, hi]``."""
    lo = [_frac(v) for v in lo]
    hi = [_frac(v) for v in hi]
    if any(a >= b for a, b in zip(lo, hi)):
        raise ValueError("box requires lo < hi componentwise")
    total = Fraction(0)
    for e, c in p.items():
        term = c
        for k in range(3):
            term *= _moment(e[k], lo[k], hi[k])
        total += term
    return total


def restrict_face(p: Poly3, axis: int, side) -> Poly2:
    """Substitute ``x_axis = side`` and return the face trace."""
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    s = int(side)
    k = axis - 1
    out: dict = {}
    for e, c in p.items():
        rest = tuple(v for i, v in enumerate(e) if i != k)
        out[rest] = out.get(rest, 0) + c * s ** e[k]
    return Poly2(out, axis, s)


def integrate_face(q: Poly2) -> Fraction:
    """Exact integral of a face trace over the reference square ``[-1, 1]^2``."""
    total = Fraction(0)
    for (a, b), c in q.items():
        if a % 2 or b % 2:
            continue
        total += c * Fraction(2, a + 1) * Fraction(2, b + 1)
    return total


def lift_face(q: Poly2) -> Poly3:
    """Embed a face polynomial as an ``x_axis``-independent :class:`Poly3`."""
    k = q.axis - 1
    out = {}
    for e, c in q.items():
        f = list(e)
        f.insert(k, 0)
        out[tuple(f)] = c
    return Poly3(out)


def linear_combination(coefs: Iterable, polys: Iterable[_PolyBase]):
    """``sum(c * p)`` with exact coefficients; at least one polynomial required."""
    it = iter(zip(coefs, polys))
    try:
        c, p = next(it)
    except StopIteration:
        raise ValueError("empty combination") from None
    out = p * c
    for c, p in it:
        if c:
            out = out + p * c
    return out
