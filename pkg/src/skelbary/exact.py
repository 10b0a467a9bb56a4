"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction`; vectors are plain tuples of them,
so every value is immutable and can be shared freely between workers.
Rank, echelon form and linear solves go through fraction-free (Bareiss)
elimination on integer rows to keep intermediate sizes bounded.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

Scalar = Fraction
Vector = tuple  # tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"a"`` or ``"a/b"`` (optional leading minus, decimal digits)."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num, den = m.groups()
    den = int(den) if den is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), den)


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def vec(coords: Iterable) -> Vector:
    """Build an immutable exact vector. Floats are converted exactly."""
    out = []
    for c in coords:
        if isinstance(c, str):
            out.append(parse_rational(c))
        else:
            out.append(Fraction(c))
    return tuple(out)


def parse_vector(text: str) -> Vector:
    return tuple(parse_rational(t) for t in text.split(","))


def format_vector(v: Sequence) -> list[str]:
    return [format_rational(c) for c in v]


def add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def combination(coeffs: Sequence, points: Sequence[Vector]) -> Vector:
    """Return ``sum(c * p)`` over paired coefficients and points."""
    dim = len(points[0])
    acc = [Fraction(0)] * dim
    for c, p in zip(coeffs, points):
        if c:
            for j in range(dim):
                acc[j] += c * p[j]
    return tuple(acc)


def zero(dim: int) -> Vector:
    return (Fraction(0),) * dim


def _common_width(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    width = len(rows[0])
    for r in rows:
        if len(r) != width:
            raise ValueError("rows have inconsistent dimensions")
    return width


def integer_row(row: Sequence) -> list[int]:
    """Scale a rational row by the lcm of its denominators."""
    den = 1
    for a in row:
        den = lcm(den, Fraction(a).denominator)
    return [int(Fraction(a) * den) for a in row]


def bareiss_echelon(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the nonzero echelon rows and their pivot columns.  Pivot rows are
    chosen as the first row (in input order) with a nonzero entry, so the
    result depends on row order only through which representatives appear.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            f = m[i][c]
            row_i = m[i]
            row_r = m[r]
            for j in range(c, ncols):
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
        prev = p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a list of equal-length rational rows."""
    _common_width(rows)
    if not rows:
        return 0
    echelon, _ = bareiss_echelon([integer_row(r) for r in rows])
    return len(echelon)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    _common_width(rows)
    if not rows:
        return [], []
    echelon, pivots = bareiss_echelon([integer_row(r) for r in rows])
    red = [[Fraction(a) for a in row] for row in echelon]
    for i in range(len(red) - 1, -1, -1):
        c = pivots[i]
        p = red[i][c]
        red[i] = [a / p for a in red[i]]
        for k in range(i):
            f = red[k][c]
            if f:
                red[k] = [a - f * b for a, b in zip(red[k], red[i])]
    return red, pivots


def nullspace(rows: Sequence[Sequence], width: Optional[int] = None) -> list[Vector]:
    """Basis of ``{x : row . x = 0 for every row}``."""
    if width is None:
        width = _common_width(rows)
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(width)) for i in range(width)]
    red, pivots = rref(rows)
    free = [c for c in range(width) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * width
        x[f] = Fraction(1)
        for row, c in zip(red, pivots):
            x[c] = -row[f]
        basis.append(tuple(x))
    return basis


@dataclass(frozen=True)
class LinearSolution:
    particular: Vector
    nullspace: list


def solve_linear(A: Sequence[Sequence], b: Sequence) -> Optional[LinearSolution]:
    """Solve ``A x = b`` exactly.

    Returns None when the system is inconsistent, otherwise a particular
    solution (free variables set to zero) and a nullspace basis.
    """
    if len(A) != len(b):
        raise ValueError("A and b have different numbers of rows")
    width = _common_width(A)
    if not A:
        return LinearSolution(zero(width), nullspace([], width))
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    red, pivots = rref(aug)
    if pivots and pivots[-1] == width:
        return None
    x = [Fraction(0)] * width
    for row, c in zip(red, pivots):
        x[c] = row[width]
    free = [c for c in range(width) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * width
        v[f] = Fraction(1)
        for row, c in zip(red, pivots):
            v[c] = -row[f]
        basis.append(tuple(v))
    return LinearSolution(tuple(x), basis)


def mat_vec(A: Sequence[Sequence], x: Sequence) -> Vector:
    return tuple(dot(row, x) for row in A)


@dataclass(frozen=True)
class AffineSubspace:
    """``base_point + span(basis)`` with ``basis`` in reduced echelon form.

    ``pivots`` are coordinates on which the projection of the subspace is
    injective, which gives cheap intrinsic coordinates.
    """

    base_point: Vector
    basis: tuple
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, x: Sequence) -> Vector:
        return tuple(Fraction(x[c]) for c in self.pivots)

    def lift(self, y: Sequence) -> Vector:
        out = list(self.base_point)
        for row, c, yi in zip(self.basis, self.pivots, y):
            t = yi - self.base_point[c]
            if t:
                for j, a in enumerate(row):
                    out[j] += t * a
        return tuple(out)

    def contains(self, x: Sequence) -> bool:
        if len(x) != len(self.base_point):
            raise ValueError("dimension mismatch")
        return self.lift(self.coordinates(x)) == tuple(x)


def affine_hull(points: Sequence[Vector]) -> AffineSubspace:
    if not points:
        raise ValueError("affine hull of an empty point set")
    _common_width(points)
    base = tuple(Fraction(c) for c in points[0])
    diffs = [sub(p, base) for p in points[1:]]
    diffs = [d for d in diffs if any(d)]
    if not diffs:
        return AffineSubspace(base, (), ())
    red, pivots = rref(diffs)
    return AffineSubspace(base, tuple(tuple(r) for r in red), tuple(pivots))
