"""
Tests for the polynomial model of the noncommutative torus, its averages and
the finite clock-shift and crossed-product models.
"""
import cmath
import math
from fractions import Fraction

import pytest

from app.core.exceptions import ModeRangeError, SchemaError, ThetaMismatch, ZeroElement
from app.services.torus_service import THETA_PRESETS, TorusService, parse_theta

GOLDEN = THETA_PRESETS["golden"]


class TestElements:
    """Monomials, products and the involution."""

    def test_commutation_relation(self, torus):
        """vu = e^{2 pi i theta} uv."""
        u, v = torus.monomial(1, 0, GOLDEN), torus.monomial(0, 1, GOLDEN)
        vu, uv = torus.torus_mul(v, u), torus.torus_mul(u, v)
        assert uv.support() == vu.support() == [(1, 1)]
        assert vu.coefficient(1, 1) == pytest.approx(cmath.exp(2j * math.pi * GOLDEN) * uv.coefficient(1, 1))

    def test_star(self, torus):
        """u^* = u^-1 and a^** = a."""
        a = torus.parse_element("2*u^-1 v^2 - 0.5", GOLDEN)
        assert torus.torus_star(torus.monomial(1, 0, GOLDEN)).support() == [(-1, 0)]
        assert torus.torus_star(torus.torus_star(a)).distance(a) < 1e-12

    def test_parse(self, torus):
        """Sums of monomials with optional coefficients."""
        a = torus.parse_element("2*u^-1 v^2 - 0.5", GOLDEN)
        assert a.coefficient(-1, 2) == 2
        assert a.coefficient(0, 0) == -0.5
        assert torus.parse_element("u+v", GOLDEN).support() == [(0, 1), (1, 0)]

    def test_parse_error(self, torus):
        """Dangling operators are schema errors."""
        with pytest.raises(SchemaError):
            torus.parse_element("u+", GOLDEN)

    def test_mode_range(self, algebras):
        """Modes beyond the configured bound are refused."""
        small = TorusService(algebras, max_mode=4)
        with pytest.raises(ModeRangeError):
            small.monomial(5, 0, GOLDEN)

    def test_theta_mismatch(self, torus):
        """Elements of different tori do not multiply."""
        with pytest.raises(ThetaMismatch):
            torus.torus_mul(torus.monomial(1, 0, GOLDEN), torus.monomial(1, 0, 0.25))

    @pytest.mark.parametrize("text,value,exact", [("golden", GOLDEN, None), ("1/3", 1 / 3, Fraction(1, 3)), ("0.25", 0.25, None)])
    def test_parse_theta(self, text, value, exact):
        """Presets, exact rationals and decimals."""
        theta, rational = parse_theta(text)
        assert theta == pytest.approx(value)
        assert rational == exact

    def test_parse_theta_error(self):
        with pytest.raises(SchemaError):
            parse_theta("pi")


class TestAverages:
    """Dirichlet factors and the two conditional expectations."""

    def test_dirichlet_factor(self, torus):
        """D_0 = 1, D_n(0) = 1, and integer x theta is never suppressed."""
        assert torus.dirichlet_factor(GOLDEN, 3, 0) == pytest.approx(1.0)
        assert torus.dirichlet_factor(GOLDEN, 0, 50) == 1.0
        assert torus.dirichlet_factor(1 / 3, 3, 50, Fraction(1, 3)) == 1.0
        assert abs(torus.dirichlet_factor(GOLDEN, 1, 100)) < 0.01

    @pytest.mark.parametrize("generator,partial", [("u", "phi1_partial"), ("v", "phi2_partial")])
    def test_closed_form_matches_literal(self, torus, generator, partial):
        """The closed-form scaling equals the explicit conjugation sum."""
        a = torus.parse_element("u + v + 0.5*u v^-1", GOLDEN)
        for n in (0, 1, 5, 20):
            literal = torus.torus_literal_average(a, n, generator)
            assert getattr(torus, partial)(a, n).distance(literal) < 1e-10

    def test_averages_are_unital(self, torus):
        """Both averages fix the unit."""
        one = torus.monomial(0, 0, GOLDEN)
        assert torus.phi1_partial(one, 7).distance(one) == 0
        assert torus.phi2_partial(one, 7).distance(one) == 0

    def test_golden_simplicity(self, torus):
        """c_n -> nu * 1 for a = u + v at the golden ratio."""
        a = torus.parse_element("u+v", GOLDEN)
        report = torus.simplicity_experiment(a, [2 ** j for j in range(12)])
        assert report.passed
        assert report.nu == pytest.approx(2.0)
        assert report.residuals[-1] < 1e-3
        assert report.literal_deviation < 1e-9

    def test_rational_resonance(self, torus):
        """At theta = 1/3 the modes k = +-3 survive every average."""
        theta, rational = parse_theta("1/3")
        a = torus.parse_element("1 + u^3", theta, rational)
        report = torus.simplicity_experiment(a, [1, 2, 4, 8])
        assert not report.passed
        assert report.resonant_modes == [(-3, 0), (3, 0)]
        assert "not simple" in report.note

    def test_zero_element(self, torus):
        with pytest.raises(ZeroElement):
            torus.simplicity_experiment(torus.element({}, GOLDEN), [1])


class TestFiniteModels:
    """Clock and shift matrices and crossed products by rotation."""

    @pytest.mark.parametrize("N", [2, 3, 5])
    def test_clock_shift(self, torus, N):
        """U^k V^m realizes the torus at theta = 1/N."""
        certificate = torus.clock_shift_check(N)
        assert certificate.passed
        assert certificate.details["relation_deviation"] < 1e-12

    @pytest.mark.parametrize("q", [1, 2, 3, 4])
    def test_crossed_product(self, torus, q):
        """A(Z_q x| Z_q) is C(Z_q) x| Z_q."""
        certificate = torus.crossed_product_bridge(q)
        assert certificate.passed
        assert certificate.details["dim"] == q * q
