"""
Tests for Minkowski gauges of polytopal disks and Mackey convergence rates.
"""
from fractions import Fraction

import pytest

from app.core.exceptions import DimensionLimitExceeded, DimensionMismatch, OffSpan
from app.models.bornology import GaugeResult, PolytopalDisk

F = Fraction
SQUARE = PolytopalDisk(dim=2, generators=((1, 0), (0, 1)))


class TestGauge:
    """The gauge is the least l1 mass of a representation."""

    def test_unit_square(self, bornology):
        """(1/2, 1/2) has gauge 1 and an exact representation."""
        gauge = bornology.disked_hull_gauge(SQUARE, (F(1, 2), F(1, 2)))
        assert gauge.value == 1
        assert gauge.coefficients == [F(1, 2), F(1, 2)]
        assert gauge.certified

    def test_negative_coordinates(self, bornology):
        """Disked hulls are balanced, so signs do not matter."""
        assert bornology.disked_hull_gauge(SQUARE, (F(-3), F(2))).value == 5

    def test_redundant_generator(self, bornology):
        """A diagonal generator shortens the diagonal."""
        D = PolytopalDisk(dim=2, generators=((1, 0), (0, 1), (1, 1)))
        assert bornology.disked_hull_gauge(D, (F(2), F(2))).value == 2

    def test_off_span_is_infinite(self, bornology):
        """Points outside the span have gauge +infinity."""
        D = PolytopalDisk(dim=2, generators=((1, 0),))
        gauge = bornology.disked_hull_gauge(D, (F(0), F(1)))
        assert gauge.infinite
        assert not gauge.at_most(F(100))

    def test_zero(self, bornology):
        """The origin has gauge 0."""
        assert bornology.disked_hull_gauge(SQUARE, (0, 0)).value == 0

    def test_limits(self, bornology):
        """Dimension and generator limits are enforced."""
        D = PolytopalDisk(dim=17, generators=(tuple([1] + [0] * 16),))
        with pytest.raises(DimensionLimitExceeded):
            bornology.disked_hull_gauge(D, [0] * 17)
        with pytest.raises(DimensionLimitExceeded):
            bornology.disked_hull_gauge(SQUARE, (1, 2, 3))

    def test_homogeneity_and_triangle(self, bornology, rng):
        """g(t v) = |t| g(v) and g(v + w) <= g(v) + g(w) on random rational points."""
        D = PolytopalDisk(dim=3, generators=((1, 2, 0), (0, 1, -1), (3, 0, 1), (1, 1, 1)))
        for _ in range(20):
            v = [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)]
            w = [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)]
            t = F(rng.randint(-7, 7), rng.randint(1, 4))
            gv = bornology.disked_hull_gauge(D, v).value
            gw = bornology.disked_hull_gauge(D, w).value
            assert bornology.disked_hull_gauge(D, [t * c for c in v]).value == abs(t) * gv
            assert bornology.disked_hull_gauge(D, [a + b for a, b in zip(v, w)]).value <= gv + gw


class TestNormingAndHulls:
    """Norming constants, absorption and circled hulls."""

    def test_square_is_norming(self, bornology):
        """The unit square norms with constant 1."""
        certificate = bornology.is_norming(SQUARE)
        assert certificate.passed
        assert certificate.details["constant"] == "1"
        assert certificate.details["span_dim"] == 2

    def test_norming_checks_combinations(self, bornology):
        """Seeded combinations of the span basis are checked beyond the basis itself."""
        D = PolytopalDisk(dim=3, generators=((1, 2, 0), (0, 1, -1), (3, 0, 1)))
        certificate = bornology.is_norming(D, samples=12, seed=3)
        assert certificate.passed
        assert certificate.details["constant"] == "3"
        assert 0 < certificate.details["combinations_checked"] <= 12
        assert bornology.is_norming(D, samples=12, seed=3) == certificate

    def test_norming_reports_a_failing_combination(self, bornology, mocker):
        """A gauge below the bound off the basis fails with that vector."""
        basis = {(F(1), F(0)), (F(0), F(1))}
        real = bornology.disked_hull_gauge

        def shrunk(D, v):
            gauge = real(D, v)
            if tuple(v) in basis:
                return gauge
            return GaugeResult(value=gauge.value / 100)

        mocker.patch.object(bornology, "disked_hull_gauge", side_effect=shrunk)
        certificate = bornology.is_norming(SQUARE)
        assert not certificate.passed
        assert tuple(F(c) for c in certificate.witness["vector"]) not in basis

    def test_absorbs(self, bornology):
        """The least radius covering a finite set is its largest gauge."""
        assert bornology.absorbs(SQUARE, [(1, 1), (F(1, 2), 0), (0, -3)]) == 3
        assert bornology.absorbs(PolytopalDisk(dim=2, generators=((1, 0),)), [(0, 1)]) is None

    def test_circled_hull(self, bornology):
        """(1/2, -1/2) lies in the circled hull of e1 and e2, (1, 1) does not."""
        assert bornology.circled_hull_membership(SQUARE.generators, (F(1, 2), F(-1, 2)))
        assert not bornology.circled_hull_membership(SQUARE.generators, (1, 1))


class TestMackeyRate:
    """Gauges of v_n - v and the slope of log g_n against log n."""

    def test_harmonic_sequence(self, bornology):
        """(1/n, 0) converges at rate n^-1."""
        seq = [(F(1, n), F(0)) for n in range(1, 65)]
        rate = bornology.mackey_rate(seq, (0, 0), SQUARE)
        assert rate.convergent
        assert rate.slope == pytest.approx(-1.0, abs=0.05)
        assert rate.gauges[3] == F(1, 4)

    def test_eventually_constant(self, bornology):
        """A sequence that reaches its limit converges."""
        seq = [(F(1), F(0)), (F(0), F(0)), (F(0), F(0))]
        assert bornology.mackey_rate(seq, (0, 0), SQUARE).convergent

    def test_off_span(self, bornology):
        """Differences outside the span are reported with their index."""
        D = PolytopalDisk(dim=2, generators=((1, 0),))
        with pytest.raises(OffSpan) as exc:
            bornology.mackey_rate([(F(1), F(0)), (F(1), F(1))], (0, 0), D)
        assert exc.value.witness == 2

    def test_dimension_mismatch(self, bornology):
        """A term shorter than the limit is refused, not truncated."""
        seq = [(F(1), F(0)), (F(1, 2),)]
        with pytest.raises(DimensionMismatch) as exc:
            bornology.mackey_rate(seq, (0, 0), SQUARE)
        assert exc.value.witness == {"n": 2, "term": 1, "limit": 2, "disk": 2}
