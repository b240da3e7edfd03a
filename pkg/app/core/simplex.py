"""Exact two-phase simplex over ``Fraction`` with Bland's rule.

Solves ``min c.x  s.t.  A x = b, x >= 0`` and returns a primal optimum
together with a dual vector ``y`` (``A^T y <= c``, ``b.y = value``) so the
caller can re-check optimality without trusting the pivoting.
"""
import logging
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence

from app.core import linalg

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPResult(NamedTuple):
    status: str
    value: Optional[Fraction]
    x: List[Fraction]
    dual: List[Fraction]


class _Tableau:
    def __init__(self, rows: List[List[Fraction]], basis: List[int]):
        self.rows = rows
        self.basis = basis

    @property
    def rhs(self) -> int:
        return len(self.rows[0]) - 1 if self.rows else 0

    def pivot(self, i: int, j: int) -> None:
        row = self.rows[i]
        lead = row[j]
        self.rows[i] = row = [v / lead for v in row]
        for k, other in enumerate(self.rows):
            if k != i and other[j]:
                f = other[j]
                self.rows[k] = [a - f * b for a, b in zip(other, row)]
        self.basis[i] = j

    def reduced_costs(self, cost: Sequence[Fraction], columns: Sequence[int]) -> List[Fraction]:
        out = []
        for j in columns:
            r = cost[j] - sum((cost[b] * row[j] for b, row in zip(self.basis, self.rows)), Fraction(0))
            out.append(r)
        return out

    def run(self, cost: Sequence[Fraction], columns: Sequence[int]) -> str:
        while True:
            entering = None
            for j, r in zip(columns, self.reduced_costs(cost, columns)):
                if r < 0 and j not in self.basis:
                    entering = j
                    break
            if entering is None:
                return OPTIMAL
            leaving = None
            best = None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = row[self.rhs] / row[entering]
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leaving]):
                        best, leaving = ratio, i
            if leaving is None:
                return UNBOUNDED
            self.pivot(leaving, entering)


def solve_lp(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction]) -> LPResult:
    """Minimize ``c.x`` over ``A x = b, x >= 0``."""
    m, n = len(A), len(c)
    if m == 0:
        if any(cj < 0 for cj in c):
            return LPResult(UNBOUNDED, None, [], [])
        return LPResult(OPTIMAL, Fraction(0), [Fraction(0)] * n, [])

    rows = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [sign * Fraction(a) for a in A[i]]
        row += [Fraction(1) if k == i else Fraction(0) for k in range(m)]
        row.append(sign * Fraction(b[i]))
        rows.append(row)
    tableau = _Tableau(rows, [n + i for i in range(m)])

    phase_one = [Fraction(0)] * n + [Fraction(1)] * m
    tableau.run(phase_one, list(range(n + m)))
    residual = sum((row[tableau.rhs] for row, v in zip(tableau.rows, tableau.basis) if v >= n), Fraction(0))
    if residual > 0:
        logger.debug("LP infeasible, phase one residual %s", residual)
        return LPResult(INFEASIBLE, None, [], [])

    # drive artificials out of the basis; rows that cannot pivot are redundant
    i = 0
    while i < len(tableau.rows):
        if tableau.basis[i] >= n:
            j = next((j for j in range(n) if tableau.rows[i][j]), None)
            if j is None:
                del tableau.rows[i]
                del tableau.basis[i]
                continue
            tableau.pivot(i, j)
        i += 1
    tableau.rows = [row[:n] + [row[-1]] for row in tableau.rows]

    cost = [Fraction(cj) for cj in c]
    if not tableau.rows:
        status = OPTIMAL if all(cj >= 0 for cj in cost) else UNBOUNDED
        if status == UNBOUNDED:
            return LPResult(UNBOUNDED, None, [], [])
    elif tableau.run(cost, list(range(n))) == UNBOUNDED:
        return LPResult(UNBOUNDED, None, [], [])

    x = [Fraction(0)] * n
    for row, var in zip(tableau.rows, tableau.basis):
        x[var] = row[-1]
    value = sum((cj * xj for cj, xj in zip(cost, x)), Fraction(0))
    dual = _dual_vector(A, cost, tableau.basis, m)
    return LPResult(OPTIMAL, value, x, dual)


def _dual_vector(A: Sequence[Sequence[Fraction]], c: Sequence[Fraction], basis: Sequence[int], m: int) -> List[Fraction]:
    """Solve ``y . A_j = c_j`` on the basic columns."""
    equations = [{i: Fraction(A[i][j]) for i in range(m) if A[i][j]} for j in basis]
    solution = linalg.solve(equations, [c[j] for j in basis], m) or {}
    return [solution.get(i, Fraction(0)) for i in range(m)]


def certify(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction], result: LPResult) -> bool:
    """Exact re-check of primal feasibility, dual feasibility and zero gap."""
    if result.status != OPTIMAL:
        return False
    m, n = len(A), len(c)
    x, y = result.x, result.dual
    if any(v < 0 for v in x):
        return False
    for i in range(m):
        if sum((A[i][j] * x[j] for j in range(n)), Fraction(0)) != b[i]:
            return False
    for j in range(n):
        if sum((A[i][j] * y[i] for i in range(m)), Fraction(0)) > c[j]:
            return False
    return sum((b[i] * y[i] for i in range(m)), Fraction(0)) == result.value
