"""Acceptance criteria; each test appends a PASS/FAIL line to the terminal summary."""
import random
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from oracles import basis_enumeration_feasible, random_lp
from skelbary.exact import parse_vector
from skelbary.experiments import ExperimentSpec, generate, probe_infeasible, run_theorem_sweep
from skelbary.lp import feasible, verify_certificate, verify_point
from skelbary.solver import (DecompositionRequest, DecompositionWitness, check_witness,
                             decompose, intersection_dimension, verify_dimension_inequality,
                             witness_from_json)
from skelbary.testmap import evaluate_phi


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    return ok


@pytest.fixture(scope="module")
def sweep():
    """The full kn >= d grid over simplex, cube and cross-polytope, d <= 4, n <= 4."""
    t0 = time.perf_counter()
    rows = []
    for gen in ("simplex", "cube", "cross_polytope"):
        for d in range(1, 5):
            for k in range(1, d + 1):
                n_lo = -(-d // k)
                if n_lo > 4:
                    continue
                spec = ExperimentSpec(gen, d, (n_lo, 4), (k, k), seed=2024)
                rows += run_theorem_sweep(spec).rows
    return rows, time.perf_counter() - t0


def _request(row):
    poly = generate(row["generator"], int(row["d"]), int(row["seed"]))
    return DecompositionRequest.homogeneous(poly, parse_vector(row["target"]),
                                            int(row["n"]), int(row["k"]))


def test_criterion_1_theorem_sweep(sweep):
    rows, elapsed = sweep
    # re-check every witness independently of the sweep's own status
    failures = 0
    for r in rows:
        if r["status"] != "witness":
            failures += 1
            continue
        req = _request(r)
        if not check_witness(req, witness_from_json(req, r["witness"])):
            failures += 1
    ok = failures == 0 and len(rows) >= 150 and elapsed < 600
    record(1, ok, f"{len(rows)} instances, {failures} failures, {elapsed:.1f}s")
    assert ok


def test_criterion_2_infeasibility_probe():
    r3 = probe_infeasible(ExperimentSpec("random_hull", 3, (2, 2), (1, 1), trials=20, seed=3))
    r4 = probe_infeasible(ExperimentSpec("random_hull", 4, (2, 3), (1, 1), trials=10, seed=4))
    rows = r3.rows + r4.rows
    infeasible = sum(r["status"] == "infeasible" for r in rows)
    anomalies = [r for r in rows if r["status"] == "feasible"]
    uncertified = [r for r in rows if r["status"] not in ("infeasible", "feasible")]
    detail = f"{infeasible}/{len(rows)} certified infeasible, {len(anomalies)} feasible anomalies"
    for r in anomalies:
        detail += f"; anomaly d={r['d']} n={r['n']} trial={r['trial']} witness={r['witness']}"
    ok = not uncertified and len(rows) == 40
    record(2, ok, detail)
    assert ok


def test_criterion_3_dimension_of_configuration_space():
    results = []
    for gen in ("cube", "cross_polytope"):
        for d in (2, 3):
            P = generate(gen, d)
            for n in (2, 3):
                got = intersection_dimension([P.full] * n, [Fraction(1, n)] * n)
                results.append((gen, d, n, got, (n - 1) * d))
    ok = all(got == want for *_, got, want in results)
    record(3, ok, ", ".join(f"{g}{d} n={n}: {got}" for g, d, n, got, _ in results))
    assert ok


def test_criterion_4_face_dimension_inequality(square, cube3):
    reps = [("square", verify_dimension_inequality(square, 2, 1)),
            ("cube3", verify_dimension_inequality(cube3, 3, 1))]
    ok = all(r.violations == 0 and r.certified > 0 for _, r in reps)
    record(4, ok, "; ".join(f"{name}: {r.certified}/{r.tuples_checked} certified, "
                            f"{r.violations} violations, min dim {r.min_dimension}"
                            for name, r in reps))
    assert ok


def test_criterion_5_testmap_vanishes_on_witnesses(sweep):
    rows, _ = sweep
    worst_phi = worst_psi = 0.0
    count = 0
    for r in rows:
        if r["status"] != "witness":
            continue
        req = _request(r)
        w = witness_from_json(req, r["witness"])
        ev = evaluate_phi(w.points, req.polytope, int(r["k"]))
        worst_phi = max(worst_phi, ev.phi_max_abs)
        worst_psi = max(worst_psi, max(ev.psi))
        count += 1
    ok = count == len(rows) and worst_phi < 1e-9 and worst_psi < 1e-9
    record(5, ok, f"{count} witnesses, max |phi| {worst_phi:.3g}, max dist {worst_psi:.3g}")
    assert ok


def test_criterion_6_strategy_agreement(sweep):
    rows, _ = sweep
    n4 = [r for r in rows if r["n"] == 4]
    agree = 0
    for r in n4:
        req = _request(r)
        direct = decompose(req)
        factored = decompose(req, strategy="factored")
        if all(isinstance(w, DecompositionWitness) and check_witness(req, w)
               for w in (direct, factored)):
            agree += 1
    ok = bool(n4) and agree == len(n4)
    record(6, ok, f"{agree}/{len(n4)} n=4 instances verified by both strategies")
    assert ok


def test_criterion_7_f_vectors():
    cases = [("cube", 3, (8, 12, 6)), ("cross_polytope", 3, (6, 12, 8)),
             ("simplex", 4, (5, 10, 10, 5))]
    got = [(g, d, generate(g, d).f_vector(), want) for g, d, want in cases]
    ok = all(fv == want for *_, fv, want in got)
    # build_polytope raises on any lattice that breaks the Euler relation,
    # so a green suite means it held for every polytope constructed
    record(7, ok, ", ".join(f"{g}{d} {fv}" for g, d, fv, _ in got) + "; Euler checked on every build")
    assert ok


def test_criterion_8_lp_oracle():
    rng = random.Random(8)
    agree = verified = feasible_count = 0
    for _ in range(50):
        lp = random_lp(rng)
        res = feasible(lp)
        agree += res.feasible == basis_enumeration_feasible(lp.A, lp.b)
        verified += verify_point(lp, res.point) if res.feasible else verify_certificate(lp, res.certificate)
        feasible_count += res.feasible
    ok = agree == 50 and verified == 50
    record(8, ok, f"{agree}/50 statuses match, {verified}/50 certificates exact "
                  f"({feasible_count} feasible)")
    assert ok
