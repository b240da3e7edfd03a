import logging
import math
import random
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from app.core import simplex
from app.core.config import settings
from app.core.exceptions import DimensionLimitExceeded, DimensionMismatch, OffSpan
from app.core.linalg import EchelonBasis
from app.models.bornology import GaugeResult, MackeyRate, PolytopalDisk
from app.models.certificate import Certificate, failed, passed

logger = logging.getLogger(__name__)

Point = Sequence[Fraction]

REAL_CIRCLING_NOTE = "real scalars: circling is modelled by closing the generators under negation"


def sup_norm(v: Point) -> Fraction:
    return max((abs(Fraction(c)) for c in v), default=Fraction(0))


class BornologyService:
    """Minkowski gauges of polytopal disks by exact linear programming."""

    def __init__(self):
        self.max_dim = settings.LP_MAX_DIMENSION
        self.max_generators = settings.LP_MAX_GENERATORS

    def _check_limits(self, D: PolytopalDisk, v: Point) -> None:
        if D.dim > self.max_dim or D.size > self.max_generators:
            raise DimensionLimitExceeded(
                f"disk exceeds d <= {self.max_dim}, generators <= {self.max_generators}", [D.dim, D.size]
            )
        if len(v) != D.dim or any(len(g) != D.dim for g in D.generators):
            raise DimensionLimitExceeded("point and generators must have the disk's dimension", [len(v), D.dim])

    def disked_hull_gauge(self, D: PolytopalDisk, v: Point) -> GaugeResult:
        """min sum(l+ + l-) s.t. sum (l+_i - l-_i) d_i = v, l+- >= 0; +inf off the span."""
        v = [Fraction(c) for c in v]
        self._check_limits(D, v)
        k = D.size
        A = [[g[i] for g in D.generators] + [-g[i] for g in D.generators] for i in range(D.dim)]
        c = [Fraction(1)] * (2 * k)
        result = simplex.solve_lp(A, v, c)
        if result.status == simplex.INFEASIBLE:
            return GaugeResult(value=None, certified=True)
        coefficients = [result.x[j] - result.x[k + j] for j in range(k)]
        certified = simplex.certify(A, v, c, result) and self._reconstructs(D, coefficients, v)
        if not certified:
            raise ArithmeticError("gauge LP failed its optimality re-check")
        return GaugeResult(value=result.value, coefficients=coefficients, dual=result.dual, certified=True)

    def _reconstructs(self, D: PolytopalDisk, coefficients: List[Fraction], v: List[Fraction]) -> bool:
        for i in range(D.dim):
            if sum((lam * g[i] for lam, g in zip(coefficients, D.generators)), Fraction(0)) != v[i]:
                return False
        return True

    def is_norming(self, D: PolytopalDisk, samples: int = 20, seed: int = 0) -> Certificate:
        """||v||_inf <= K * gauge(v) on span D with K = max ||d_i||_inf.

        Checked on a span basis and on ``samples`` seeded rational combinations of it.
        """
        constant = max((sup_norm(g) for g in D.generators), default=Fraction(0))
        span = EchelonBasis({i: c for i, c in enumerate(g) if c} for g in D.generators)
        basis = [[span.rows[p].get(i, Fraction(0)) for i in range(D.dim)] for p in span.pivots]
        rng = random.Random(seed)
        combinations = []
        for _ in range(samples if basis else 0):
            coefficients = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in basis]
            vec = [sum((c * b[i] for c, b in zip(coefficients, basis)), Fraction(0)) for i in range(D.dim)]
            if any(vec):
                combinations.append(vec)
        checked = []
        for vec in basis + combinations:
            gauge = self.disked_hull_gauge(D, vec)
            if gauge.infinite or gauge.value <= 0 or sup_norm(vec) > constant * gauge.value:
                return failed("norming", {"vector": [str(c) for c in vec]}, constant=str(constant))
            checked.append(str(gauge.value))
        return passed(
            "norming",
            constant=str(constant),
            span_dim=span.rank,
            basis_gauges=checked[:len(basis)],
            combinations_checked=len(combinations),
        )

    def absorbs(self, D: PolytopalDisk, S: Sequence[Point]) -> Optional[Fraction]:
        """Least r with S inside r.D, or None (+inf) if some point is off the span."""
        worst = Fraction(0)
        for s in S:
            gauge = self.disked_hull_gauge(D, s)
            if gauge.infinite:
                return None
            worst = max(worst, gauge.value)
        return worst

    def mackey_rate(self, seq: Sequence[Point], limit: Point, D: PolytopalDisk) -> MackeyRate:
        """Gauges g_n = ||v_n - v||_D and the least-squares slope of log g_n against log n."""
        gauges: List[Fraction] = []
        for n, vn in enumerate(seq, start=1):
            if len(vn) != len(limit) or len(vn) != D.dim:
                raise DimensionMismatch("sequence term, limit and disk differ in dimension", {"n": n, "term": len(vn), "limit": len(limit), "disk": D.dim})
            diff = [Fraction(a) - Fraction(b) for a, b in zip(vn, limit)]
            gauge = self.disked_hull_gauge(D, diff)
            if gauge.infinite:
                raise OffSpan("difference leaves the span of the disk", n)
            gauges.append(gauge.value)
        points = [(math.log(n), math.log(float(g))) for n, g in enumerate(gauges, start=1) if g > 0]
        slope = None
        if len(points) >= 2:
            xs, ys = zip(*points)
            slope = float(np.polyfit(np.array(xs), np.array(ys), 1)[0])
        tail_zero = bool(gauges) and gauges[-1] == 0
        convergent = tail_zero or (slope is not None and slope < -0.1)
        return MackeyRate(gauges=gauges, slope=slope, convergent=convergent)

    def circled_hull_membership(self, generators: Sequence[Point], v: Point) -> bool:
        """v in the disked hull of the generators and their negations (gauge <= 1)."""
        closed = [tuple(Fraction(c) for c in g) for g in generators]
        closed += [tuple(-c for c in g) for g in closed]
        D = PolytopalDisk(dim=len(v), generators=tuple(closed))
        return self.disked_hull_gauge(D, v).at_most(Fraction(1))
