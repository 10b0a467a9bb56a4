"""Polytope generators and the sweep/probe experiments behind the CLI.

Randomness comes from numpy's PCG64 bit generator, seeded through
``SeedSequence``.  Each report row carries the polytope seed and the exact
target, so it can be replayed with the ``decompose`` subcommand.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from .exact import combination, format_rational, rank, sub
from .polytope import Polytope, build_polytope
from .solver import DecompositionRequest, DecompositionWitness, check_witness, decompose
from .testmap import evaluate_phi

GENERATORS = ("simplex", "cube", "cross_polytope", "random_hull")
TARGET_KINDS = ("barycenter", "interior", "boundary")
CSV_COLUMNS = ("generator", "d", "n", "k", "status", "tuples_examined", "phi_max_abs",
               "elapsed_ms", "trial", "seed", "target_kind", "target")
TESTMAP_TOL = 1e-9


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def _random_rational_point(rng: np.random.Generator, dim: int) -> tuple:
    return tuple(Fraction(int(v), 1000) for v in rng.integers(-1000, 1001, size=dim))


def generate(generator: str, dim: int, seed: int = 0, n_points: Optional[int] = None) -> Polytope:
    """Standard simplex, ``[-1,1]^d`` cube, cross-polytope or a seeded random hull."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if generator == "simplex":
        pts = [tuple(0 for _ in range(dim))]
        pts += [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    elif generator == "cube":
        pts = list(product((-1, 1), repeat=dim))
    elif generator == "cross_polytope":
        pts = [tuple(s * int(i == j) for j in range(dim)) for i in range(dim) for s in (1, -1)]
    elif generator == "random_hull":
        count = n_points if n_points is not None else 2 * dim + 2
        if count < dim + 2:
            raise ValueError("random_hull needs at least dim + 2 points")
        rng = rng_for(seed, 0)
        while True:
            pts = [_random_rational_point(rng, dim) for _ in range(count)]
            if rank([sub(p, pts[0]) for p in pts[1:]]) == dim:
                break
    else:
        raise ValueError(f"unknown generator {generator!r}")
    return build_polytope(pts, name=f"{generator}-{dim}")


def _positive_weights(rng: np.random.Generator, m: int) -> list[Fraction]:
    raw = [int(x) for x in rng.integers(1, 1001, size=m)]
    s = sum(raw)
    return [Fraction(r, s) for r in raw]


def make_target(poly: Polytope, kind: str, rng: np.random.Generator) -> tuple:
    """Vertex barycenter, random relative-interior point, or random facet point."""
    verts = list(poly.vertices)
    if kind == "barycenter":
        return combination([Fraction(1, len(verts))] * len(verts), verts)
    if kind == "interior":
        return combination(_positive_weights(rng, len(verts)), verts)
    if kind == "boundary":
        facets = poly.lattice.of_dim(poly.dim - 1)
        facet = facets[int(rng.integers(0, len(facets)))]
        pts = facet.points
        return combination(_positive_weights(rng, len(pts)), pts)
    raise ValueError(f"unknown target kind {kind!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    generator: str
    dim: int
    n_range: tuple
    k_range: tuple
    trials: int = 1
    seed: int = 0
    targets: tuple = TARGET_KINDS

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        for lo, hi in (self.n_range, self.k_range):
            if lo > hi:
                raise ValueError("empty range")
        if self.n_range[0] < 1 or self.k_range[0] < 0:
            raise ValueError("n must be >= 1 and k >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def pairs(self):
        return [(n, k) for n in range(self.n_range[0], self.n_range[1] + 1)
                for k in range(self.k_range[0], self.k_range[1] + 1)]


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)

    @property
    def success_count(self) -> int:
        return sum(r["status"] in ("witness", "infeasible") for r in self.rows)

    @property
    def failure_count(self) -> int:
        return len(self.rows) - self.success_count

    @property
    def violation_count(self) -> int:
        return sum(r["status"] == "violation" for r in self.rows)

    def summary(self) -> dict:
        return {"success": self.success_count, "failure": self.failure_count,
                "violations": self.violation_count}

    def to_csv(self, timing: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            row = dict(r)
            if not timing:
                row["elapsed_ms"] = ""
            writer.writerow([row[c] for c in CSV_COLUMNS])
        return buf.getvalue()


@dataclass(frozen=True)
class _Instance:
    generator: str
    dim: int
    n: int
    k: int
    trial: int
    seed: int
    target_kind: str
    mode: str  # "theorem" | "probe"


def polytope_seed(inst: _Instance) -> int:
    return (inst.seed + inst.trial) % 2 ** 64 if inst.generator == "random_hull" else inst.seed


def instance_problem(inst: _Instance) -> tuple[Polytope, tuple]:
    """Rebuild the polytope and target of a sweep row from its identifiers."""
    poly = generate(inst.generator, inst.dim, polytope_seed(inst))
    kind_idx = TARGET_KINDS.index(inst.target_kind)
    rng = rng_for(inst.seed, inst.trial, kind_idx, 1)
    return poly, make_target(poly, inst.target_kind, rng)


def _run_instance(inst: _Instance) -> dict:
    poly, target = instance_problem(inst)
    req = DecompositionRequest.homogeneous(poly, target, inst.n, inst.k)
    t0 = time.perf_counter()
    out = decompose(req)
    elapsed = (time.perf_counter() - t0) * 1000
    row = {"generator": inst.generator, "d": inst.dim, "n": inst.n, "k": inst.k,
           "tuples_examined": out.tuples_examined, "phi_max_abs": "",
           "elapsed_ms": f"{elapsed:.1f}", "trial": inst.trial, "seed": polytope_seed(inst),
           "target_kind": inst.target_kind,
           "target": ",".join(format_rational(c) for c in target)}
    if isinstance(out, DecompositionWitness):
        ok = check_witness(req, out)
        ev = evaluate_phi(out.points, poly, inst.k)
        row["phi_max_abs"] = repr(ev.phi_max_abs)
        if inst.mode == "probe":
            row["status"] = "feasible"
        elif not ok:
            row["status"] = "violation"
        elif ev.phi_max_abs >= TESTMAP_TOL or max(ev.psi) >= TESTMAP_TOL:
            row["status"] = "testmap_mismatch"
        else:
            row["status"] = "witness"
        row["witness"] = out.to_json()
    else:
        if not out.all_certified:
            row["status"] = "uncertified"
        else:
            row["status"] = "infeasible" if inst.mode == "probe" else "violation"
    return row


def _run_all(instances: list, parallel: bool, workers: Optional[int]) -> ExperimentReport:
    if parallel:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_instance, instances))
    else:
        rows = [_run_instance(i) for i in instances]
    return ExperimentReport(rows)


def run_theorem_sweep(spec: ExperimentSpec, parallel: bool = False,
                      workers: Optional[int] = None) -> ExperimentReport:
    """Decompose, check and evaluate the test map on every instance of the grid."""
    bad = [(n, k) for n, k in spec.pairs() if k * n < spec.dim]
    if bad:
        raise ValueError(f"pairs with k*n < d={spec.dim}: {bad}")
    instances = [_Instance(spec.generator, spec.dim, n, k, t, spec.seed, kind, "theorem")
                 for t in range(spec.trials) for n, k in spec.pairs() for kind in spec.targets]
    return _run_all(instances, parallel, workers)


def probe_infeasible(spec: ExperimentSpec, parallel: bool = False,
                     workers: Optional[int] = None) -> ExperimentReport:
    """Random interior targets with ``k*n < d``; feasible draws are anomalies, not errors."""
    bad = [(n, k) for n, k in spec.pairs() if k * n >= spec.dim]
    if bad:
        raise ValueError(f"pairs with k*n >= d={spec.dim}: {bad}")
    instances = [_Instance(spec.generator, spec.dim, n, k, t, spec.seed, "interior", "probe")
                 for t in range(spec.trials) for n, k in spec.pairs()]
    return _run_all(instances, parallel, workers)
