"""Convex polytopes given by vertices, with their full face lattice.

Everything is exact.  A polytope whose hull is not full-dimensional in its
ambient space is handled in intrinsic coordinates: a subset of ambient
coordinates on which projection of the affine hull is injective.  Callers
only ever see ambient coordinates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd, lcm
from typing import Optional, Sequence

from . import lp as exact_lp
from .exact import (AffineSubspace, Vector, affine_hull, dot, format_rational,
                    parse_rational, rank, vec)


class NotInPolytope(ValueError):
    """Raised when a point that must lie in a polytope does not."""


@dataclass(frozen=True, eq=False)
class Face:
    """A face of a polytope, identified by the vertices lying on it."""

    vertex_ids: tuple
    dim: int
    hull: Optional[AffineSubspace]
    polytope: "Polytope" = field(repr=False)

    @property
    def vertex_set(self) -> int:
        """Bitset of ``vertex_ids``."""
        return sum(1 << i for i in self.vertex_ids)

    @property
    def points(self) -> list[Vector]:
        return [self.polytope.vertices[i] for i in self.vertex_ids]

    def __eq__(self, other):
        return (isinstance(other, Face) and self.vertex_ids == other.vertex_ids
                and self.polytope is other.polytope)

    def __hash__(self):
        return hash((self.vertex_ids, id(self.polytope)))

    def __lt__(self, other: "Face"):
        return (self.dim, self.vertex_ids) < (other.dim, other.vertex_ids)

    def __repr__(self):
        return f"Face(dim={self.dim}, vertex_ids={list(self.vertex_ids)})"


@dataclass(frozen=True)
class FaceLattice:
    faces: tuple  # every face, sorted by (dim, vertex_ids); faces[0] is empty
    incidence: tuple  # vertex bitset of each facet

    @cached_property
    def by_vertex_set(self) -> dict:
        return {f.vertex_set: f for f in self.faces}

    def of_dim(self, j: int) -> list[Face]:
        return [f for f in self.faces if f.dim == j]

    def f_vector(self) -> tuple:
        top = max(f.dim for f in self.faces)
        return tuple(sum(1 for f in self.faces if f.dim == j) for j in range(top))


@dataclass(frozen=True, eq=False)
class Polytope:
    """Vertices, facet inequalities ``normal . x <= offset`` and face lattice."""

    vertices: tuple
    facets: tuple
    dim: int
    hull: AffineSubspace
    lattice: FaceLattice = field(repr=False)
    name: str = ""

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @property
    def full(self) -> Face:
        return self.lattice.faces[-1]

    def f_vector(self) -> tuple:
        return self.lattice.f_vector()

    def face(self, vertex_ids: Sequence[int]) -> Face:
        key = sum(1 << i for i in vertex_ids)
        try:
            return self.lattice.by_vertex_set[key]
        except KeyError:
            raise ValueError(f"{sorted(vertex_ids)} is not a face") from None

    def canonical_form(self) -> tuple:
        """Labelling-independent summary used to compare polytopes."""
        verts = sorted(self.vertices)
        faces = sorted(tuple(sorted(f.points)) for f in self.lattice.faces)
        return tuple(verts), tuple(faces)

    def to_json(self) -> str:
        return json.dumps({
            "name": self.name,
            "vertices": [[format_rational(c) for c in v] for v in self.vertices],
        })

    def __repr__(self):
        return (f"Polytope(name={self.name!r}, dim={self.dim}, "
                f"vertices={len(self.vertices)}, facets={len(self.facets)})")


def _int_det(m: list[list[int]]) -> int:
    """Determinant of a square integer matrix by Bareiss elimination."""
    n = len(m)
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign, prev = 1, 1
    for c in range(n - 1):
        if m[c][c] == 0:
            piv = next((i for i in range(c + 1, n) if m[i][c] != 0), None)
            if piv is None:
                return 0
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                m[i][j] = (p * m[i][j] - m[i][c] * m[c][j]) // prev
        prev = p
    return sign * m[n - 1][n - 1]


def _facets_intrinsic(pts: list[Vector], d: int) -> list[tuple]:
    """Brute-force facet enumeration over ``d``-subsets of points in R^d.

    Points are scaled to a common integer lattice; the hyperplane normal
    through ``d`` points is the vector of signed maximal minors of their
    difference matrix.
    """
    den = 1
    for p in pts:
        for c in p:
            den = lcm(den, c.denominator)
    ipts = [tuple(int(c * den) for c in p) for p in pts]
    found = set()
    for subset in combinations(range(len(ipts)), d):
        p0 = ipts[subset[0]]
        rows = [[a - b for a, b in zip(ipts[i], p0)] for i in subset[1:]]
        normal = []
        for j in range(d):
            minor = [r[:j] + r[j + 1:] for r in rows]
            normal.append((-1) ** j * _int_det(minor))
        g = 0
        for a in normal:
            g = gcd(g, a)
        if g == 0:
            continue
        normal = tuple(a // g for a in normal)
        b = sum(a * x for a, x in zip(normal, p0))
        lo = hi = b
        for q in ipts:
            v = sum(a * x for a, x in zip(normal, q))
            if v < lo:
                lo = v
            elif v > hi:
                hi = v
            if lo < b < hi:
                break
        if hi == b:
            found.add((normal, Fraction(b, den)))
        elif lo == b:
            found.add((tuple(-a for a in normal), Fraction(-b, den)))
    return sorted(found)


def build_polytope(points: Sequence[Sequence], name: str = "") -> Polytope:
    """Convex hull of ``points`` with facets and the graded face lattice.

    Duplicate and non-vertex points are dropped; retained vertices keep
    their input order.
    """
    if not points:
        raise ValueError("cannot build a polytope from no points")
    pts: list[Vector] = []
    seen = set()
    for p in points:
        v = vec(p)
        if pts and len(v) != len(pts[0]):
            raise ValueError("points have inconsistent dimensions")
        if v not in seen:
            seen.add(v)
            pts.append(v)
    hull = affine_hull(pts)
    d = hull.dim
    local = [hull.coordinates(p) for p in pts]

    if d == 0:
        vertices = [pts[0]]
        facets_local: list[tuple] = []
    else:
        facets_local = _facets_intrinsic(local, d)
        keep = []
        for idx, y in enumerate(local):
            tight = [a for a, b in facets_local if dot(a, y) == b]
            if tight and _rank_at_least(tight, d):
                keep.append(idx)
        vertices = [pts[i] for i in keep]
        local = [local[i] for i in keep]

    ambient = len(pts[0])
    facets = []
    for a, b in facets_local:
        normal = [Fraction(0)] * ambient
        for c, ai in zip(hull.pivots, a):
            normal[c] = Fraction(ai)
        facets.append((tuple(normal), Fraction(b)))

    incidence = []
    for a, b in facets_local:
        bits = 0
        for i, y in enumerate(local):
            if dot(a, y) == b:
                bits |= 1 << i
        incidence.append(bits)

    poly = Polytope(tuple(vertices), tuple(facets), d, hull,
                    FaceLattice((), ()), name)
    lattice = _build_lattice(poly, incidence)
    object.__setattr__(poly, "lattice", lattice)
    _check_euler(poly)
    return poly


def _rank_at_least(rows, r) -> bool:
    return rank(rows) >= r


def _build_lattice(poly: Polytope, incidence: list[int]) -> FaceLattice:
    nverts = len(poly.vertices)
    full = (1 << nverts) - 1
    seen = {full}
    queue = [full]
    while queue:
        cur = queue.pop()
        for f in incidence:
            g = cur & f
            if g not in seen:
                seen.add(g)
                queue.append(g)
    seen.add(0)
    faces = []
    for bits in seen:
        ids = tuple(i for i in range(nverts) if bits >> i & 1)
        if ids:
            hull = affine_hull([poly.vertices[i] for i in ids])
            faces.append(Face(ids, hull.dim, hull, poly))
        else:
            faces.append(Face((), -1, None, poly))
    faces.sort()
    return FaceLattice(tuple(faces), tuple(incidence))


def _check_euler(poly: Polytope) -> None:
    d = poly.dim
    fv = poly.f_vector()
    lhs = sum((-1) ** i * f for i, f in enumerate(fv))
    if lhs != 1 - (-1) ** d:
        raise AssertionError(f"Euler relation fails for f-vector {fv}")


def euler_characteristic_holds(poly: Polytope) -> bool:
    fv = poly.f_vector()
    return sum((-1) ** i * f for i, f in enumerate(fv)) == 1 - (-1) ** poly.dim


def polytope_from_json(text: str) -> Polytope:
    data = json.loads(text)
    verts = [[parse_rational(c) for c in v] for v in data["vertices"]]
    return build_polytope(verts, name=data.get("name", ""))


def translate(poly: Polytope, shift: Sequence) -> Polytope:
    shift = vec(shift)
    return build_polytope([tuple(a + b for a, b in zip(v, shift)) for v in poly.vertices],
                          name=poly.name)


def faces_of_dim_at_most(poly: Polytope, k: int) -> list[Face]:
    """Nonempty faces of dimension at most ``k`` in (dim, vertex_ids) order."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return [f for f in poly.lattice.faces if 0 <= f.dim <= k]


def _check_dim(poly: Polytope, x: Sequence) -> None:
    if len(x) != poly.ambient_dim:
        raise ValueError(f"point has dimension {len(x)}, polytope lives in {poly.ambient_dim}")


def contains(poly: Polytope, x: Sequence) -> bool:
    _check_dim(poly, x)
    x = vec(x)
    if not poly.hull.contains(x):
        return False
    return all(dot(a, x) <= b for a, b in poly.facets)


def tight_facets(poly: Polytope, x: Sequence) -> list[int]:
    return [i for i, (a, b) in enumerate(poly.facets) if dot(a, x) == b]


def carrier_face(poly: Polytope, p: Sequence) -> Face:
    """The inclusion-minimal face containing ``p``; ``p`` is in its relative interior."""
    p = vec(p)
    if not contains(poly, p):
        raise NotInPolytope(f"{[format_rational(c) for c in p]} is not in the polytope")
    bits = (1 << len(poly.vertices)) - 1
    for i in tight_facets(poly, p):
        bits &= poly.lattice.incidence[i]
    return poly.lattice.by_vertex_set[bits]


def is_subface(small: Face, big: Face) -> bool:
    return small.vertex_set & ~big.vertex_set == 0


def subfaces(face: Face, max_dim: Optional[int] = None) -> list[Face]:
    """Nonempty faces of the polytope contained in ``face``, in lattice order."""
    top = face.dim if max_dim is None else max_dim
    bits = face.vertex_set
    return [g for g in face.polytope.lattice.faces
            if 0 <= g.dim <= top and g.vertex_set & ~bits == 0]


def face_membership(face: Face, x: Sequence) -> Optional[tuple]:
    """Exact convex coefficients over ``face``'s vertices reproducing ``x``, or None."""
    if not face.vertex_ids:
        return None
    x = vec(x)
    pts = face.points
    rows = [[p[j] for p in pts] for j in range(len(x))]
    rows.append([Fraction(1)] * len(pts))
    res = exact_lp.feasible(exact_lp.StandardLP(rows, list(x) + [Fraction(1)]))
    return res.point if res.feasible else None
