"""
Tests for convolution algebras: structure constants, units, isomorphism
certificates, ideals and separability sections.
"""
from fractions import Fraction

import pytest

from app.core import linalg
from app.core.exceptions import DimensionMismatch, ParentMismatch
from app.core.scalars import I, ONE, gaussian
from app.models.groupoid import HaarSystem
from app.services.algebra_service import identity_map

SWAP_01 = [[0, 1, 2], [1, 0, 2]]


class TestConvolution:
    """Products, the involution and the unit of A(G)."""

    def test_pair_structure_constants(self, constructors, algebras, counting):
        """pair(2) with counting weights has 8 nonzero structure constants, all 1."""
        constants = algebras.structure_constants(counting(constructors.pair_groupoid(2)))
        assert constants.nonzero_count() == 8
        assert all(c == ONE for *_, c in constants.entries())

    def test_weights_enter_products(self, constructors, groupoids, algebras):
        """delta_g * delta_h = w(h) delta_gh."""
        haar = groupoids.canonical_haar(constructors.pair_groupoid(2), [1, 3])
        # (1,0) * (0,1) = (1,1), weight of (0,1) is u(0) = 1; (0,1) * (1,0) has weight u(1) = 3
        assert algebras.convolve(algebras.delta(haar, 2), algebras.delta(haar, 1)).sparse() == {3: ONE}
        assert algebras.convolve(algebras.delta(haar, 1), algebras.delta(haar, 2)).sparse() == {0: gaussian(3)}

    def test_unit(self, constructors, groupoids, algebras):
        """The unit sum_x delta_{1_x} / u(x) is two-sided and solves the unit equations."""
        haar = groupoids.canonical_haar(constructors.pair_groupoid(2), [2, 5])
        e = algebras.unit_element(haar)
        for g in range(4):
            delta = algebras.delta(haar, g)
            assert algebras.convolve(e, delta).same_as(delta)
            assert algebras.convolve(delta, e).same_as(delta)
        assert linalg.same(algebras.algebra_unit(algebras.as_algebra(haar)), e.sparse())

    def test_star_is_an_anti_involution(self, constructors, algebras, counting):
        """(a b)^* = b^* a^* and a^** = a for counting weights."""
        haar = counting(constructors.named_group("S3"))
        a = algebras.element(haar, {1: ONE, 2: I})
        b = algebras.element(haar, {3: gaussian(2, -1)})
        assert algebras.star(algebras.star(a)).same_as(a)
        lhs = algebras.star(algebras.convolve(a, b))
        rhs = algebras.convolve(algebras.star(b), algebras.star(a))
        assert lhs.same_as(rhs)

    def test_laws_on_random_groupoids(self, algebras, random_instances, rng):
        """Associativity, the star laws and the unit hold for random G, Haar weights and elements."""
        for _ in range(10):
            G = random_instances.random_groupoid(rng, 60)
            haar = random_instances.random_haar(rng, G)
            a, b, c = (algebras.element(haar, random_instances.random_vector(rng, G)) for _ in range(3))
            certificates = algebras.convolution_laws(a, b, c)
            assert [cert.name for cert in certificates] == ["associativity", "star_antihomomorphism", "star_involution", "unit"]
            assert all(cert.passed for cert in certificates), [cert.witness for cert in certificates]

    def test_laws_detect_a_non_invariant_system(self, constructors, algebras):
        """Weights that are not right invariant break associativity."""
        G = constructors.pair_groupoid(2)
        # w(hk) = w(h) fails for h = (1,2), k = (2,1)
        haar = HaarSystem.model_construct(groupoid=G, weights=(Fraction(1), Fraction(2), Fraction(1), Fraction(1)))
        a, b, c = (algebras.delta(haar, g) for g in (2, 1, 2))
        by_name = {cert.name: cert for cert in algebras.convolution_laws(a, b, c)}
        assert not by_name["associativity"].passed

    def test_parent_mismatch(self, constructors, groupoids, algebras, counting):
        """Elements of different Haar systems cannot be multiplied."""
        P = constructors.pair_groupoid(2)
        a = algebras.delta(counting(P), 0)
        b = algebras.delta(groupoids.canonical_haar(P, [1, 2]), 0)
        with pytest.raises(ParentMismatch):
            algebras.convolve(a, b)

    def test_zero_algebra_has_no_unit(self, algebras):
        """Zero multiplication admits no unit."""
        assert algebras.algebra_unit(algebras.zero_algebra(2)) is None


class TestIsomorphisms:
    """Exact certificates for algebra isomorphisms."""

    def test_z2_splits(self, constructors, algebras, counting):
        """A(*//Z2) is C x C via the idempotents (1 +- delta_-1) / 2."""
        A = algebras.field_product(2)
        B = algebras.as_algebra(counting(constructors.z2_groupoid()))
        certificate = algebras.check_algebra_iso(algebras.z2_split_map(), A, B)
        assert certificate.passed
        assert certificate.details["rank"] == 2

    def test_identity_is_not_a_z2_split(self, constructors, algebras, counting):
        """The identity map C x C -> A(*//Z2) is not multiplicative."""
        A = algebras.field_product(2)
        B = algebras.as_algebra(counting(constructors.z2_groupoid()))
        certificate = algebras.check_algebra_iso(identity_map(2), A, B)
        assert not certificate.passed
        assert certificate.witness["indices"] == [0, 1]

    def test_singular_map(self, algebras):
        """A rank-deficient map is not an isomorphism."""
        A = algebras.field_product(2)
        certificate = algebras.check_algebra_iso({0: {0: ONE}, 1: {0: ONE}}, A, A)
        assert certificate.witness == {"reason": "not bijective"}

    def test_dimension_mismatch(self, algebras):
        """Different dimensions are refused before any check."""
        with pytest.raises(DimensionMismatch):
            algebras.check_algebra_iso(identity_map(2), algebras.field_product(2), algebras.field_product(3))

    def test_tensor_product(self, constructors, groupoids, algebras):
        """A(G) (x) A(H) is A(G x H) with product weights."""
        first = groupoids.canonical_haar(constructors.pair_groupoid(2), [1, 2])
        second = groupoids.validate_haar(constructors.z2_groupoid(), [3, 3])
        result = algebras.tensor_algebra_iso(first, second)
        assert result.certificate.passed
        assert result.certificate.details["dim"] == 8
        assert result.product.n_arrows == 8

    def test_haar_change(self, constructors, groupoids, algebras, counting):
        """Rescaling by w / w' identifies algebras of different Haar systems."""
        P = constructors.pair_groupoid(3)
        mapping, certificate = algebras.haar_change_iso(counting(P), groupoids.canonical_haar(P, [1, 2, 3]))
        assert certificate.passed
        assert mapping[8] == {8: gaussian("1/3")}

    def test_identity_does_not_change_haar(self, constructors, groupoids, algebras, counting):
        """Without rescaling the two products disagree."""
        P = constructors.pair_groupoid(2)
        A = algebras.as_algebra(counting(P))
        B = algebras.as_algebra(groupoids.canonical_haar(P, [1, 2]))
        assert not algebras.check_algebra_iso(identity_map(4), A, B).passed


class TestIdeals:
    """Two-sided ideals spanned by delta functions."""

    def test_invariant_set_gives_ideal(self, constructors, algebras, counting):
        """Arrows inside an orbit span a proper two-sided ideal."""
        G = constructors.action_groupoid(constructors.z2_groupoid(), 3, SWAP_01)
        A = algebras.as_algebra(counting(G))
        certificate = algebras.ideal_check(A, algebras.orbit_ideal(G, [2]))
        assert certificate.passed
        assert certificate.details["is_proper"]
        assert certificate.details["dim"] == 2

    def test_non_invariant_set(self, constructors, algebras, counting):
        """A single object of pair(3) is not invariant; the left side fails first."""
        G = constructors.pair_groupoid(3)
        A = algebras.as_algebra(counting(G))
        certificate = algebras.ideal_check(A, algebras.orbit_ideal(G, [0]))
        assert not certificate.passed
        assert certificate.witness["side"] == "left"

    def test_zero_and_whole(self, constructors, algebras, counting):
        """The zero subspace and the whole algebra are ideals."""
        A = algebras.as_algebra(counting(constructors.pair_groupoid(2)))
        assert algebras.ideal_check(A, []).details["is_zero"]
        whole = algebras.ideal_check(A, [{g: ONE} for g in range(4)])
        assert whole.passed and not whole.details["is_proper"]


class TestSeparability:
    """Sections of multiplication, solved exactly."""

    @pytest.mark.parametrize("side", ["left", "right", "bimodule"])
    def test_groupoid_algebras_are_separable(self, constructors, algebras, counting, side):
        """A(pair(2)) is a matrix algebra and has every kind of section."""
        A = algebras.as_algebra(counting(constructors.pair_groupoid(2)))
        result = algebras.find_separability_section(A, side)
        assert result.found
        assert set(result.section) == {0, 1, 2, 3}

    def test_zero_algebra(self, algebras):
        """Multiplication by zero has no section."""
        result = algebras.find_separability_section(algebras.zero_algebra(1), "bimodule")
        assert not result.found
        assert "inconsistent" in result.note

    def test_unknown_side(self, algebras):
        """Only left, right and bimodule sections exist."""
        with pytest.raises(ValueError):
            algebras.find_separability_section(algebras.field_product(1), "middle")
