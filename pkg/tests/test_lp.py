import random
from fractions import Fraction

import pytest

from oracles import basis_enumeration_feasible, random_lp
from skelbary.lp import (ShapeError, StandardLP, basis_count_bound, feasible, max_slack,
                         verify_certificate, verify_point)


def test_simple_feasible():
    lp = StandardLP([[1, 1]], [1])
    res = feasible(lp)
    assert res.feasible
    assert verify_point(lp, res.point)


def test_simple_infeasible_certificate():
    lp = StandardLP([[1, 1]], [-1])
    res = feasible(lp)
    assert res.status == "infeasible"
    assert res.certificate == (Fraction(-1),)
    assert verify_certificate(lp, res.certificate)


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        StandardLP([[1, 1]], [1, 2])
    with pytest.raises(ShapeError):
        StandardLP([[1, 1], [1]], [1, 2])


def test_random_lps_agree_with_basis_enumeration():
    rng = random.Random(20240)
    statuses = []
    for _ in range(50):
        lp = random_lp(rng)
        res = feasible(lp)
        expected = basis_enumeration_feasible(lp.A, lp.b)
        assert res.feasible == expected
        if res.feasible:
            assert verify_point(lp, res.point)
        else:
            assert verify_certificate(lp, res.certificate)
        assert res.pivots <= basis_count_bound(lp)
        statuses.append(res.feasible)
    assert any(statuses) and not all(statuses)


def test_degenerate_and_redundant_rows():
    # duplicated and zero rows, degenerate vertex at the origin
    lp = StandardLP([[1, -1, 0], [1, -1, 0], [0, 0, 0], [2, -2, 0]], [0, 0, 0, 0])
    res = feasible(lp)
    assert res.feasible and verify_point(lp, res.point)


def test_deterministic():
    rng = random.Random(5)
    for _ in range(10):
        lp = random_lp(rng)
        assert feasible(lp) == feasible(lp)


def test_json_round_trip():
    lp = StandardLP([[Fraction(1, 3), -2]], [Fraction(-5, 7)])
    assert StandardLP.from_json(lp.to_json()) == lp


def test_max_slack_segment_midpoint():
    out = max_slack(StandardLP([[1, 1]], [1]), [0, 1])
    assert out.slack == Fraction(1, 2)
    assert out.result.point == (Fraction(1, 2), Fraction(1, 2))


def test_max_slack_single_point_region():
    lp = StandardLP([[1, 1], [1, 0]], [1, 1])
    out = max_slack(lp, [0, 1])
    assert out.slack == 0
    assert verify_point(lp, out.result.point)


def test_max_slack_infeasible_passes_certificate_through():
    lp = StandardLP([[1, 1]], [-1])
    out = max_slack(lp, [0])
    assert not out.result.feasible
    assert verify_certificate(lp, out.result.certificate)


def test_max_slack_unbounded():
    out = max_slack(StandardLP([[1, -1]], [0]), [0, 1])
    assert not out.bounded and out.slack is None


def test_max_slack_random_points_verify():
    rng = random.Random(9)
    for _ in range(30):
        lp = random_lp(rng)
        cols = [j for j in range(lp.n_cols) if rng.random() < 0.6]
        out = max_slack(lp, cols)
        if out.result.feasible and out.bounded:
            assert verify_point(lp, out.result.point)
            assert all(out.result.point[j] >= out.slack for j in cols)
            assert out.slack >= 0
