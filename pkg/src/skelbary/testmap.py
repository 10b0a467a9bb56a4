"""Distances to a skeleton and the mean-subtracted distance vector.

For a tuple of points, ``psi`` collects each point's Euclidean distance to
the ``k``-skeleton and ``phi = psi - mean(psi)`` is its projection onto the
sum-zero hyperplane.  ``phi`` vanishes exactly when all distances agree.

The nearest point of a face is found by projecting onto the affine hull of
every subface and keeping projections that land inside their subface.
Projections are computed in exact rationals (float inputs are converted
exactly), so membership is decided without tolerance; only the final
square root is floating point.
"""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import Vector, dot, solve_linear, sub, vec
from .polytope import Face, Polytope, contains, faces_of_dim_at_most, subfaces

_projectors: "weakref.WeakKeyDictionary[Face, tuple]" = weakref.WeakKeyDictionary()


def _projector(face: Face) -> tuple:
    """(base, basis rows, inverse Gram matrix) of the face's affine hull."""
    cached = _projectors.get(face)
    if cached is None:
        basis = face.hull.basis
        gram = [[dot(u, v) for v in basis] for u in basis]
        k = len(basis)
        inv_cols = [solve_linear(gram, [Fraction(int(i == j)) for i in range(k)]).particular
                    for j in range(k)]
        inv = [[inv_cols[j][i] for j in range(k)] for i in range(k)]
        cached = (face.hull.base_point, basis, inv)
        _projectors[face] = cached
    return cached


def project_to_hull(x: Vector, face: Face) -> Vector:
    base, basis, inv = _projector(face)
    if not basis:
        return base
    r = sub(x, base)
    rhs = [dot(u, r) for u in basis]
    coef = [dot(row, rhs) for row in inv]
    out = list(base)
    for c, u in zip(coef, basis):
        if c:
            for j, a in enumerate(u):
                out[j] += c * a
    return tuple(out)


def _sq_dist_to_face(x: Vector, face: Face) -> Fraction:
    poly = face.polytope
    best = None
    for g in subfaces(face):
        y = project_to_hull(x, g)
        if not contains(poly, y):
            continue
        diff = sub(x, y)
        sq = dot(diff, diff)
        if best is None or sq < best:
            best = sq
            if sq == 0:
                break
    return best


def dist_to_face(x: Sequence, face: Face) -> float:
    """Euclidean distance from ``x`` to the convex hull of the face's vertices."""
    x = vec(x)
    if len(x) != face.polytope.ambient_dim:
        raise ValueError("dimension mismatch")
    return math.sqrt(_sq_dist_to_face(x, face))


def dist_to_skeleton(x: Sequence, poly: Polytope, k: int) -> float:
    """Distance from ``x`` to the union of faces of dimension at most ``k``."""
    x = vec(x)
    best = None
    # every subface of a face of dim <= k is itself in this list
    for g in faces_of_dim_at_most(poly, k):
        y = project_to_hull(x, g)
        if not contains(poly, y):
            continue
        diff = sub(x, y)
        sq = dot(diff, diff)
        if best is None or sq < best:
            best = sq
            if sq == 0:
                break
    return math.sqrt(best)


@dataclass(frozen=True)
class TestMapEvaluation:
    psi: tuple
    phi: tuple
    phi_max_abs: float

    def to_dict(self) -> dict:
        return {"psi": list(self.psi), "phi": list(self.phi), "phi_max_abs": self.phi_max_abs}


TestMapEvaluation.__test__ = False  # keep pytest from collecting it


def phi_from_psi(psi: Sequence[float]) -> tuple:
    # fsum is correctly rounded, hence independent of summation order
    mean = math.fsum(psi) / len(psi)
    return tuple(p - mean for p in psi)


def evaluate_phi(points: Sequence[Sequence], poly: Polytope, k: int) -> TestMapEvaluation:
    if not points:
        raise ValueError("need at least one point")
    psi = tuple(dist_to_skeleton(p, poly, k) for p in points)
    phi = phi_from_psi(psi)
    return TestMapEvaluation(psi, phi, max(abs(v) for v in phi))
