"""Barycenter decompositions of a point over skeleta of a polytope.

Given a polytope ``P``, a target ``p`` in ``P`` and parts ``(k_i, w_i)``,
:func:`decompose` looks for points ``p_i`` in faces of dimension at most
``k_i`` with ``sum w_i p_i = p``.  The search runs inside the carrier face
of ``p`` and walks tuples of faces in a fixed canonical order (total
dimension ascending, then face index lexicographically).  Each tuple is
first screened by support-function bounds in a few directions and only then
handed to the exact LP.  Every rejection is backed by a Farkas certificate:
LP rejections carry one explicitly, bound rejections are one implicitly
(see :func:`direction_certificate`).
"""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, lcm
from typing import Optional, Sequence, Union

import numpy as np

from . import lp as exact_lp
from .exact import (Vector, combination, dot, format_rational, parse_rational, rank,
                    sub, vec)
from .polytope import (Face, NotInPolytope, Polytope, carrier_face, contains,
                       subfaces)

log = logging.getLogger(__name__)


class CertificationError(RuntimeError):
    """An infeasibility claim could not be backed by a verified certificate."""


@dataclass(frozen=True)
class Part:
    skeleton_dim: int
    weight: Fraction


@dataclass(frozen=True)
class DecompositionRequest:
    polytope: Polytope
    target: Vector
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "target", vec(self.target))
        parts = tuple(p if isinstance(p, Part) else Part(int(p[0]), Fraction(p[1]))
                      for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise ValueError("a request needs at least one part")
        if any(p.weight <= 0 for p in parts):
            raise ValueError("weights must be positive")
        if sum(p.weight for p in parts) != 1:
            raise ValueError("weights must sum to 1")
        if any(p.skeleton_dim < 0 for p in parts):
            raise ValueError("skeleton dimensions must be nonnegative")
        if len(self.target) != self.polytope.ambient_dim:
            raise ValueError("target dimension does not match the polytope")

    @classmethod
    def homogeneous(cls, polytope: Polytope, target, n: int, k: int) -> "DecompositionRequest":
        if n < 1:
            raise ValueError("n must be positive")
        return cls(polytope, target, tuple(Part(k, Fraction(1, n)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.parts)

    @property
    def is_homogeneous(self) -> bool:
        first = self.parts[0]
        return all(p == first for p in self.parts)


@dataclass(frozen=True)
class DecompositionWitness:
    points: tuple
    carriers: tuple
    coefficients: tuple
    tuples_examined: int
    deterministic: bool = True

    def to_dict(self) -> dict:
        return {
            "points": [[format_rational(c) for c in p] for p in self.points],
            "carriers": [list(f.vertex_ids) for f in self.carriers],
            "coefficients": [[format_rational(c) for c in cs] for cs in self.coefficients],
            "tuples_examined": self.tuples_examined,
            "deterministic": self.deterministic,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class InfeasibilityReport:
    tuples_examined: int
    all_certified: bool
    lp_calls: int = 0
    pruned: int = 0

    def to_dict(self) -> dict:
        return {"status": "infeasible", "tuples_examined": self.tuples_examined,
                "all_certified": self.all_certified, "lp_calls": self.lp_calls,
                "pruned": self.pruned}


Outcome = Union[DecompositionWitness, InfeasibilityReport]


def witness_from_json(req: DecompositionRequest, text: str) -> DecompositionWitness:
    data = json.loads(text)
    return DecompositionWitness(
        points=tuple(tuple(parse_rational(c) for c in p) for p in data["points"]),
        carriers=tuple(req.polytope.face(ids) for ids in data["carriers"]),
        coefficients=tuple(tuple(parse_rational(c) for c in cs) for cs in data["coefficients"]),
        tuples_examined=int(data["tuples_examined"]),
        deterministic=bool(data.get("deterministic", True)),
    )


# -- tuple search ----------------------------------------------------------

def _directions(poly: Polytope) -> list[Vector]:
    dim = poly.ambient_dim
    dirs = []
    seen = set()
    axes = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    for a in axes + [n for n, _ in poly.facets]:
        neg = tuple(-x for x in a)
        if a in seen or neg in seen:
            continue
        seen.add(a)
        dirs.append(a)
    return dirs


def tuple_lp(faces: Sequence[Face], weights: Sequence[Fraction], target: Vector) -> exact_lp.StandardLP:
    """LP over per-face convex coefficients with ``sum w_i x_i = target``.

    Rows: one "coefficients sum to 1" row per face, then one row per
    intrinsic coordinate of the polytope.
    """
    poly = faces[0].polytope
    hull = poly.hull
    t = hull.coordinates(target)
    n = len(faces)
    cols = []
    for i, (f, w) in enumerate(zip(faces, weights)):
        for v in f.points:
            y = hull.coordinates(v)
            cols.append([Fraction(int(r == i)) for r in range(n)]
                        + [w * (a - b) for a, b in zip(y, t)])
    nrows = n + len(t)
    A = [[c[r] for c in cols] for r in range(nrows)]
    b = [Fraction(1)] * n + [Fraction(0)] * len(t)
    return exact_lp.StandardLP(A, b)


def direction_certificate(faces: Sequence[Face], weights: Sequence[Fraction],
                          target: Vector, direction: Sequence) -> Optional[tuple]:
    """Farkas vector for :func:`tuple_lp` from one violated direction bound.

    If ``sum w_i max_{v in F_i} a.(v - p) < 0`` the vector with ``a`` on the
    coordinate rows and ``-w_i max_i`` on the face rows certifies
    infeasibility; the mirrored case uses ``-a``.  Returns None when the
    direction does not separate.
    """
    poly = faces[0].polytope
    hull = poly.hull
    t = hull.coordinates(target)
    a_amb = vec(direction)
    # express the ambient functional on intrinsic coordinates via the lift
    a_int = [dot(a_amb, row) for row in hull.basis]
    for sign in (1, -1):
        a = [sign * x for x in a_int]
        tops = []
        for f in faces:
            tops.append(max(dot(a, sub(hull.coordinates(v), t)) for v in f.points))
        if sum((w * m for w, m in zip(weights, tops)), Fraction(0)) < 0:
            return tuple([-w * m for w, m in zip(weights, tops)] + list(a))
    return None


class _TupleSearch:
    """Canonical-order enumeration of face tuples for one request."""

    def __init__(self, req: DecompositionRequest):
        self.req = req
        poly = req.polytope
        self.carrier = carrier_face(poly, req.target)
        self.faces = subfaces(self.carrier)
        order = sorted(range(req.n), key=lambda i: (req.parts[i].skeleton_dim, req.parts[i].weight))
        self.order = order
        self.parts = [req.parts[i] for i in order]
        n = len(self.parts)
        cdim = self.carrier.dim
        self.kcap = [min(p.skeleton_dim, cdim) for p in self.parts]
        self.same_as_prev = [i > 0 and self.parts[i] == self.parts[i - 1] for i in range(n)]
        self.max_rest = [sum(self.kcap[i:]) for i in range(n + 1)]
        self.dims = np.array([f.dim for f in self.faces])

        W = 1
        for p in self.parts:
            W = lcm(W, p.weight.denominator)
        w = [int(p.weight * W) for p in self.parts]
        dirs = _directions(poly)
        target = req.target
        lo = [[min(dot(a, v) for v in f.points) for a in dirs] for f in self.faces]
        hi = [[max(dot(a, v) for v in f.points) for a in dirs] for f in self.faces]
        tv = [dot(a, target) for a in dirs]
        clo = [min(dot(a, v) for v in self.carrier.points) for a in dirs]
        chi = [max(dot(a, v) for v in self.carrier.points) for a in dirs]
        L = 1
        for x in [c for row in lo + hi for c in row] + tv + clo + chi:
            L = lcm(L, x.denominator)

        def ints(xs):
            return [int(x * L) for x in xs]

        lo_i = [ints(r) for r in lo]
        hi_i = [ints(r) for r in hi]
        bound = max([abs(x) for r in lo_i + hi_i for x in r] + [abs(x) for x in ints(tv)] + [1])
        dtype = np.int64 if bound * W * (n + 1) < 2 ** 62 else object
        self.tgt = np.array([W * x for x in ints(tv)], dtype=dtype)
        self.wlo = [np.array([[wi * x for x in r] for r in lo_i], dtype=dtype) for wi in w]
        self.whi = [np.array([[wi * x for x in r] for r in hi_i], dtype=dtype) for wi in w]
        clo_i, chi_i = ints(clo), ints(chi)
        self.suf_lo = [np.array([sum(w[i] * clo_i[a] for i in range(j, n)) for a in range(len(dirs))],
                                dtype=dtype) for j in range(n + 1)]
        self.suf_hi = [np.array([sum(w[i] * chi_i[a] for i in range(j, n)) for a in range(len(dirs))],
                                dtype=dtype) for j in range(n + 1)]
        self.zero = np.zeros(len(dirs), dtype=dtype)

        self.examined = 0
        self.lp_calls = 0
        self.pruned = 0

    @property
    def max_total(self) -> int:
        return self.max_rest[0]

    def _candidates(self, j: int, budget: int, start: int, s_lo, s_hi):
        leaf = j == len(self.parts) - 1
        if leaf:
            mask = self.dims == budget
        else:
            mask = (self.dims <= min(self.kcap[j], budget)) & (self.dims >= budget - self.max_rest[j + 1])
        mask &= self.dims <= self.kcap[j]
        if start:
            mask[:start] = False
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            return idx, None, None
        new_lo = s_lo + self.wlo[j][idx]
        new_hi = s_hi + self.whi[j][idx]
        ok = np.all(new_lo + self.suf_lo[j + 1] <= self.tgt, axis=1) & \
            np.all(new_hi + self.suf_hi[j + 1] >= self.tgt, axis=1)
        if leaf:
            self.examined += int(idx.size)
        self.pruned += int(idx.size - np.count_nonzero(ok))
        return idx[ok], new_lo[ok], new_hi[ok]

    def _solve(self, chosen: list[int]) -> Optional[DecompositionWitness]:
        faces = [self.faces[i] for i in chosen]
        weights = [p.weight for p in self.parts]
        lp = tuple_lp(faces, weights, self.req.target)
        self.lp_calls += 1
        res = exact_lp.feasible(lp)
        if not res.feasible:
            if not exact_lp.verify_certificate(lp, res.certificate):
                raise CertificationError(f"unverifiable Farkas vector for tuple {chosen}")
            return None
        coeffs, pos = [], 0
        for f in faces:
            coeffs.append(tuple(res.point[pos:pos + len(f.vertex_ids)]))
            pos += len(f.vertex_ids)
        points = [combination(c, f.points) for c, f in zip(coeffs, faces)]
        # restore the caller's part order
        n = len(chosen)
        out_pts, out_faces, out_coeffs = [None] * n, [None] * n, [None] * n
        for slot, orig in enumerate(self.order):
            out_pts[orig], out_faces[orig], out_coeffs[orig] = points[slot], faces[slot], coeffs[slot]
        return DecompositionWitness(tuple(out_pts), tuple(out_faces), tuple(out_coeffs),
                                    self.examined)

    def run_level(self, total: int, first: Optional[int] = None) -> Optional[DecompositionWitness]:
        """Search tuples with dimension sum ``total``; optionally fix the first face."""
        n = len(self.parts)

        def rec(j, budget, start, s_lo, s_hi, chosen):
            idx, lo, hi = self._candidates(j, budget, start, s_lo, s_hi)
            if j == 0 and first is not None:
                keep = idx == first
                idx, lo, hi = idx[keep], lo[keep] if lo is not None else lo, hi[keep] if hi is not None else hi
            for pos, f in enumerate(idx):
                f = int(f)
                chosen.append(f)
                if j == n - 1:
                    w = self._solve(chosen)
                else:
                    nxt = f if self.same_as_prev[j + 1] else 0
                    w = rec(j + 1, budget - int(self.dims[f]), nxt, lo[pos], hi[pos], chosen)
                chosen.pop()
                if w is not None:
                    return w
            return None

        return rec(0, total, 0, self.zero, self.zero, [])

    def first_level_candidates(self, total: int) -> list[int]:
        idx, _, _ = self._candidates(0, total, 0, self.zero, self.zero)
        self.examined = 0
        self.pruned = 0
        return [int(i) for i in idx]

    def worst_case(self) -> int:
        """Size of the full (symmetry-reduced) enumeration space."""
        total = 1
        i, n = 0, len(self.parts)
        while i < n:
            j = i
            while j + 1 < n and self.same_as_prev[j + 1]:
                j += 1
            m = int(np.count_nonzero(self.dims <= self.kcap[i]))
            g = j - i + 1
            total *= comb(m + g - 1, g)
            i = j + 1
        return total


def _subtree(req: DecompositionRequest, total: int, first: int):
    search = _TupleSearch(req)
    w = search.run_level(total, first)
    return w, search.examined, search.lp_calls, search.pruned


def _direct(req: DecompositionRequest, parallel: bool = False,
            workers: Optional[int] = None) -> Outcome:
    search = _TupleSearch(req)
    if not parallel:
        for total in range(search.max_total + 1):
            w = search.run_level(total)
            if w is not None:
                return w
        return InfeasibilityReport(search.examined, True, search.lp_calls, search.pruned)

    examined = lp_calls = pruned = 0
    with ProcessPoolExecutor(max_workers=workers or os.cpu_count()) as pool:
        for total in range(search.max_total + 1):
            firsts = search.first_level_candidates(total)
            pending = {pool.submit(_subtree, req, total, f) for f in firsts}
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    w, e, c, p = fut.result()
                    examined, lp_calls, pruned = examined + e, lp_calls + c, pruned + p
                    if w is not None:
                        for other in pending:
                            other.cancel()
                        return DecompositionWitness(w.points, w.carriers, w.coefficients,
                                                    examined, deterministic=False)
    return InfeasibilityReport(examined, True, lp_calls, pruned)


def _largest_prime_factor(n: int) -> int:
    best, m, p = 1, n, 2
    while p * p <= m:
        while m % p == 0:
            best, m = p, m // p
        p += 1
    return max(best, m) if m > 1 else best


def _factored(poly: Polytope, target: Vector, n: int, k: int) -> tuple[Outcome, int]:
    a = _largest_prime_factor(n)
    b = n // a
    if b == 1:
        out = _direct(DecompositionRequest.homogeneous(poly, target, n, k))
        return out, out.tuples_examined
    carrier = carrier_face(poly, target)
    outer_k = min(k * b, carrier.dim)
    outer = _direct(DecompositionRequest.homogeneous(poly, target, a, outer_k))
    examined = outer.tuples_examined
    if isinstance(outer, InfeasibilityReport):
        return outer, examined
    points, carriers, coeffs = [], [], []
    for q in outer.points:
        inner, e = _factored(poly, q, b, k)
        examined += e
        if isinstance(inner, InfeasibilityReport):
            return InfeasibilityReport(examined, inner.all_certified, inner.lp_calls, inner.pruned), examined
        points.extend(inner.points)
        carriers.extend(inner.carriers)
        coeffs.extend(inner.coefficients)
    return DecompositionWitness(tuple(points), tuple(carriers), tuple(coeffs), examined), examined


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n ** 0.5) + 1))


def decompose(req: DecompositionRequest, strategy: str = "direct",
              parallel: bool = False, workers: Optional[int] = None) -> Outcome:
    """Find a witness ``p_1..p_n`` on the requested skeleta, or certify there is none.

    ``strategy="factored"`` splits a composite ``n = a*b`` (``a`` the largest
    prime factor): first ``a`` points on the ``min(k*b, dim)``-skeleton, then
    each of those is split into ``b`` points on the ``k``-skeleton inside its
    own carrier face.
    """
    if not contains(req.polytope, req.target):
        raise NotInPolytope("target is not in the polytope")
    if strategy == "direct":
        out = _direct(req, parallel=parallel, workers=workers)
    elif strategy == "factored":
        if not req.is_homogeneous:
            raise ValueError("factored strategy needs equal parts")
        n = req.n
        if n < 4 or _is_prime(n):
            raise ValueError(f"factored strategy needs composite n, got {n}")
        out, _ = _factored(req.polytope, req.target, n, req.parts[0].skeleton_dim)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if isinstance(out, InfeasibilityReport) and req.is_homogeneous:
        k = req.parts[0].skeleton_dim
        if k * req.n >= carrier_face(req.polytope, req.target).dim:
            log.error("search exhausted although k*n >= dim: %s", out)
    return out


def decompose_general(req: DecompositionRequest) -> Outcome:
    """Heterogeneous skeleton dimensions and weights; no existence guarantee."""
    return decompose(req, strategy="direct")


def enumeration_size(req: DecompositionRequest) -> int:
    """Worst-case number of tuples the direct strategy may examine."""
    return _TupleSearch(req).worst_case()


def check_witness(req: DecompositionRequest, w: DecompositionWitness) -> bool:
    """Exact check of the barycenter, per-point coefficients and carrier dimensions."""
    n = req.n
    if not (len(w.points) == len(w.carriers) == len(w.coefficients) == n):
        return False
    poly = req.polytope
    for part, pt, face, cs in zip(req.parts, w.points, w.carriers, w.coefficients):
        if face.polytope is not poly and face.polytope.vertices != poly.vertices:
            return False
        if face.vertex_set not in poly.lattice.by_vertex_set:
            return False
        if face.dim < 0 or face.dim > part.skeleton_dim:
            return False
        if len(pt) != poly.ambient_dim or len(cs) != len(face.vertex_ids):
            return False
        if any(c < 0 for c in cs) or sum(cs) != 1:
            return False
        if combination(cs, [poly.vertices[i] for i in face.vertex_ids]) != tuple(pt):
            return False
    bary = combination([p.weight for p in req.parts], list(w.points))
    return bary == tuple(req.target)


# -- dimension calculus ----------------------------------------------------

@dataclass(frozen=True)
class IntersectionInfo:
    dim: int
    relint_certified: bool
    slack: Fraction
    attained: tuple  # faces whose product's relative interior meets the set


def _solution_space_dim(faces: Sequence[Face], weights: Sequence[Fraction], target: Vector) -> int:
    """Dimension of ``{(x_i) in prod aff(F_i) : sum w_i x_i = target}`` (assumed nonempty)."""
    poly = faces[0].polytope
    hull = poly.hull
    d = poly.dim
    cols = []
    for f, w in zip(faces, weights):
        for row in f.hull.basis:
            cols.append([w * c for c in hull.coordinates(row)] if hull.pivots else [])
    unknowns = len(cols)
    if unknowns == 0 or d == 0:
        return unknowns
    M = [[c[r] for c in cols] for r in range(d)]
    return unknowns - rank(M)


def intersection_info(faces: Sequence[Face], weights: Sequence, target=None) -> Optional[IntersectionInfo]:
    faces = list(faces)
    if not faces:
        raise ValueError("need at least one face")
    poly = faces[0].polytope
    if any(f.polytope is not poly for f in faces):
        raise ValueError("faces come from different polytopes")
    weights = [Fraction(w) for w in weights]
    if len(weights) != len(faces) or any(w <= 0 for w in weights):
        raise ValueError("need one positive weight per face")
    if any(f.dim < 0 for f in faces):
        return None
    total = sum(weights)
    if target is None:
        target = (Fraction(0),) * poly.ambient_dim
    target = vec(target)
    # tuple_lp normalizes by total weight: sum (w/total) x_i = target/total
    lp = tuple_lp(faces, [w / total for w in weights], tuple(c / total for c in target))
    ncols = lp.n_cols
    res = exact_lp.max_slack(lp, range(ncols))
    if not res.result.feasible:
        return None
    if res.slack > 0:
        return IntersectionInfo(_solution_space_dim(faces, weights, target), True, res.slack,
                                tuple(faces))
    # Find coefficients that vanish on the whole set, then a point with all
    # others positive; its per-face carriers are the attained faces.
    live = [j for j in range(ncols) if exact_lp.max_slack(lp, [j]).slack > 0]
    keep = exact_lp.StandardLP([[row[j] for j in live] for row in lp.A], lp.b)
    inner = exact_lp.max_slack(keep, range(len(live)))
    assert inner.slack is not None and inner.slack > 0
    mu = [Fraction(0)] * ncols
    for j, v in zip(live, inner.result.point):
        mu[j] = v
    attained, pos = [], 0
    for f in faces:
        cs = mu[pos:pos + len(f.vertex_ids)]
        pos += len(f.vertex_ids)
        attained.append(carrier_face(poly, combination(cs, f.points)))
    return IntersectionInfo(_solution_space_dim(attained, weights, target), False, Fraction(0),
                            tuple(attained))


def intersection_dimension(faces: Sequence[Face], weights: Sequence, target=None) -> Optional[int]:
    """Dimension of ``{(x_i) : x_i in F_i, sum w_i x_i = target}``; None if empty.

    ``target`` defaults to the origin, so equal weights give the faces of
    ``P^n`` cut by the subspace of tuples summing to zero.
    """
    info = intersection_info(faces, weights, target)
    return None if info is None else info.dim


@dataclass(frozen=True)
class DimensionReport:
    n: int
    k: int
    dim: int
    bound: int
    tuples_checked: int
    certified: int
    violations: int
    min_dimension: Optional[int]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_dimension_inequality(poly: Polytope, n: int, k: int) -> DimensionReport:
    """Check ``dim >= n(k+1) - d`` on every relative-interior-certified tuple.

    Tuples range over multisets of ``n`` faces of dimension at least ``k+1``
    with equal weights; the origin must be interior to ``poly``.
    """
    d = poly.dim
    if k * n < d:
        raise ValueError(f"need k*n >= d, got k={k}, n={n}, d={d}")
    origin = (Fraction(0),) * poly.ambient_dim
    if not contains(poly, origin) or carrier_face(poly, origin) != poly.full:
        raise ValueError("the origin must be in the relative interior; translate first")
    bound = n * (k + 1) - d
    big = [f for f in poly.lattice.faces if f.dim >= k + 1]
    weights = [Fraction(1, n)] * n
    checked = certified = violations = 0
    lowest = None
    for tup in combinations_with_replacement(big, n):
        checked += 1
        info = intersection_info(tup, weights)
        if info is None or not info.relint_certified:
            continue
        certified += 1
        lowest = info.dim if lowest is None else min(lowest, info.dim)
        if info.dim < bound:
            violations += 1
    return DimensionReport(n, k, d, bound, checked, certified, violations, lowest)
