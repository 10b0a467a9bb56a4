"""Exact Phase-I simplex for ``{x : A x = b, x >= 0}``.

The tableau is kept integral in the Edmonds/Bareiss style: every entry is
the true rational value multiplied by a common positive denominator ``D``
(the current basis determinant), and a pivot updates non-pivot rows as
``(p * t - f * r) // D``, which is always an exact division.  Entering and
leaving variables follow Bland's rule, so the method terminates on every
input without perturbation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import Optional, Sequence

from .exact import format_rational, parse_rational


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class StandardLP:
    """Equality-form LP data; all variables are implicitly nonnegative."""

    A: tuple
    b: tuple

    def __init__(self, A: Sequence[Sequence], b: Sequence):
        A = tuple(tuple(Fraction(a) for a in row) for row in A)
        b = tuple(Fraction(x) for x in b)
        if len(A) != len(b):
            raise ShapeError(f"{len(A)} rows in A but {len(b)} entries in b")
        if A and any(len(row) != len(A[0]) for row in A):
            raise ShapeError("ragged constraint matrix")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n_rows(self) -> int:
        return len(self.A)

    @property
    def n_cols(self) -> int:
        return len(self.A[0]) if self.A else 0

    def to_json(self) -> str:
        return json.dumps({
            "A": [[format_rational(a) for a in row] for row in self.A],
            "b": [format_rational(x) for x in self.b],
        })

    @classmethod
    def from_json(cls, text: str) -> "StandardLP":
        data = json.loads(text)
        return cls([[parse_rational(a) for a in row] for row in data["A"]],
                   [parse_rational(x) for x in data["b"]])


@dataclass(frozen=True)
class LPResult:
    status: str  # "feasible" | "infeasible"
    point: Optional[tuple] = None
    certificate: Optional[tuple] = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


@dataclass(frozen=True)
class SlackResult:
    """Outcome of :func:`max_slack`; ``slack`` is None when unbounded."""

    result: LPResult
    slack: Optional[Fraction] = None
    bounded: bool = True


def verify_point(lp: StandardLP, x: Sequence) -> bool:
    if len(x) != lp.n_cols or any(v < 0 for v in x):
        return False
    return all(sum((a * v for a, v in zip(row, x)), Fraction(0)) == rhs
               for row, rhs in zip(lp.A, lp.b))


def verify_certificate(lp: StandardLP, y: Sequence) -> bool:
    """Check ``y^T A <= 0`` componentwise and ``y^T b > 0`` exactly."""
    if len(y) != lp.n_rows:
        return False
    for j in range(lp.n_cols):
        if sum((y[i] * lp.A[i][j] for i in range(lp.n_rows)), Fraction(0)) > 0:
            return False
    return sum((yi * bi for yi, bi in zip(y, lp.b)), Fraction(0)) > 0


def basis_count_bound(lp: StandardLP) -> int:
    """Number of candidate bases of the Phase-I tableau; a pivot ceiling."""
    return comb(lp.n_cols + lp.n_rows, lp.n_rows)


class _Tableau:
    """Integer tableau with artificial columns and one objective row."""

    def __init__(self, lp: StandardLP):
        m, n = lp.n_rows, lp.n_cols
        self.m, self.n = m, n
        self.row_factor: list[Fraction] = []
        rows = []
        for row, rhs in zip(lp.A, lp.b):
            # row_factor[i] * (original row i) == integer row i, with rhs >= 0
            den = 1
            for a in row:
                den = lcm(den, a.denominator)
            den = lcm(den, rhs.denominator)
            sign = -1 if rhs < 0 else 1
            self.row_factor.append(Fraction(sign * den))
            rows.append([int(a * den * sign) for a in row] + [int(rhs * den * sign)])
        # columns: x_0..x_{n-1}, a_0..a_{m-1}, rhs
        self.width = n + m + 1
        self.rhs = n + m
        self.T = []
        for i, ints in enumerate(rows):
            art = [0] * m
            art[i] = 1
            self.T.append(ints[:n] + art + [ints[n]])
        obj = [0] * self.width
        for i in range(m):
            for j in range(n):
                obj[j] -= self.T[i][j]
            obj[self.rhs] -= self.T[i][self.rhs]
        self.obj = obj
        self.D = 1
        self.basis = [n + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r: int, c: int) -> None:
        T, D = self.T, self.D
        prow = T[r]
        p = prow[c]
        for i in range(len(T)):
            if i == r:
                continue
            row = T[i]
            f = row[c]
            if f == 0:
                if p != D:
                    T[i] = [(p * a) // D for a in row]
                continue
            T[i] = [(p * a - f * b) // D for a, b in zip(row, prow)]
        f = self.obj[c]
        self.obj = [(p * a - f * b) // D for a, b in zip(self.obj, prow)]
        self.D = p
        self.basis[r] = c
        if self.D < 0:
            self.T = [[-a for a in row] for row in self.T]
            self.obj = [-a for a in self.obj]
            self.D = -self.D
        self.pivots += 1

    def set_objective(self, cost: dict[int, int]) -> None:
        """Install reduced costs for ``min sum cost[j] x_j`` (integer costs)."""
        D = self.D
        obj = [0] * self.width
        for j, cj in cost.items():
            obj[j] += D * cj
        for i, bj in enumerate(self.basis):
            cb = cost.get(bj, 0)
            if cb:
                row = self.T[i]
                for j in range(self.width):
                    obj[j] -= cb * row[j]
        self.obj = obj

    def run(self, allowed: int) -> str:
        """Bland's rule on columns ``< allowed``; returns optimal/unbounded."""
        while True:
            c = next((j for j in range(allowed) if self.obj[j] < 0), None)
            if c is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.T):
                a = row[c]
                if a > 0:
                    key_num, key_den = row[self.rhs], a
                    if best is None:
                        best = (i, key_num, key_den)
                        continue
                    _, bn, bd = best
                    lhs, rhs_ = key_num * bd, bn * key_den
                    if lhs < rhs_ or (lhs == rhs_ and self.basis[i] < self.basis[best[0]]):
                        best = (i, key_num, key_den)
            if best is None:
                return "unbounded"
            self.pivot(best[0], c)

    def values(self) -> list[Fraction]:
        x = [Fraction(0)] * self.n
        for i, bj in enumerate(self.basis):
            if bj < self.n:
                x[bj] = Fraction(self.T[i][self.rhs], self.D)
        return x

    def drive_out_artificials(self) -> None:
        """Pivot zero-level artificials out of the basis; drop redundant rows."""
        i = 0
        while i < len(self.T):
            if self.basis[i] >= self.n:
                row = self.T[i]
                c = next((j for j in range(self.n) if row[j] != 0), None)
                if c is None:
                    del self.T[i]
                    del self.basis[i]
                    continue
                self.pivot(i, c)
            i += 1


def _phase_one(lp: StandardLP) -> tuple[_Tableau, LPResult]:
    tab = _Tableau(lp)
    tab.run(tab.n)
    if tab.obj[tab.rhs] != 0:
        # reduced cost of artificial i is 1 - y'_i
        y = []
        for i in range(tab.m):
            yi = 1 - Fraction(tab.obj[tab.n + i], tab.D)
            y.append(yi * tab.row_factor[i])
        return tab, LPResult("infeasible", certificate=tuple(y), pivots=tab.pivots)
    return tab, LPResult("feasible", point=tuple(tab.values()), pivots=tab.pivots)


def feasible(lp: StandardLP) -> LPResult:
    """Decide feasibility of ``A x = b, x >= 0`` with verifiable evidence."""
    _, res = _phase_one(lp)
    return res


def max_slack(lp: StandardLP, slack_columns: Sequence[int]) -> SlackResult:
    """Maximize ``t`` subject to ``A x = b, x >= 0`` and ``x_j >= t`` on ``slack_columns``.

    The substitution ``x_j = s_j + t`` (with ``t >= 0``) turns this into an
    equality-form problem solved by Phase I followed by a Bland Phase II.
    """
    cols = sorted(set(slack_columns))
    if any(j < 0 or j >= lp.n_cols for j in cols):
        raise ShapeError("slack column out of range")
    base = feasible(lp)
    if not base.feasible:
        return SlackResult(base, None)
    if not cols:
        return SlackResult(base, Fraction(0))
    t_col = lp.n_cols
    A = []
    for row in lp.A:
        A.append(list(row) + [sum((row[j] for j in cols), Fraction(0))])
    aux = StandardLP(A, lp.b)
    tab, res = _phase_one(aux)
    pivots = tab.pivots
    tab.drive_out_artificials()
    tab.set_objective({t_col: -1})
    status = tab.run(tab.n)
    pivots = tab.pivots
    if status == "unbounded":
        return SlackResult(LPResult("feasible", point=base.point, pivots=pivots), None, bounded=False)
    vals = tab.values()
    t = vals[t_col]
    x = list(vals[:t_col])
    for j in cols:
        x[j] += t
    return SlackResult(LPResult("feasible", point=tuple(x), pivots=pivots), t)
