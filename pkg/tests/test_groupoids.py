"""
Tests for groupoid constructors, axiom checks, Haar systems and homomorphisms.
"""
from fractions import Fraction

import pytest

from app.core.exceptions import (
    BadInverse,
    BadUnit,
    EmptyGroupoid,
    NotACover,
    NotAGroup,
    NotAnAction,
    NotFree,
    NotInvariant,
    NotPositive,
    SchemaError,
    SourceTargetMismatch,
)
from app.models.groupoid import FiniteGroupoid

SWAP_01 = [[0, 1, 2], [1, 0, 2]]
FREE_Z2 = [[0, 1], [1, 0], [2, 3], [3, 2]]


class TestConstructors:
    """Every constructor produces a valid groupoid with a fixed index order."""

    def test_pair_groupoid_indexing(self, constructors, groupoids):
        """Arrow t * n + s goes from s to t and there are n^3 composable pairs."""
        G = groupoids.validate_groupoid(constructors.pair_groupoid(3))
        assert G.n_arrows == 9
        assert (G.src[5], G.tgt[5]) == (2, 1)
        assert len(G.compose) == 27
        assert G.mul(1 * 3 + 2, 2 * 3 + 0) == 1 * 3 + 0

    @pytest.mark.parametrize("name,order", [("Z2", 2), ("Z5", 5), ("S3", 6)])
    def test_named_groups(self, constructors, groupoids, name, order):
        """Named groups are one-object groupoids of the right order."""
        G = groupoids.validate_groupoid(constructors.named_group(name))
        assert (G.n_objects, G.n_arrows) == (1, order)

    def test_action_groupoid(self, constructors, groupoids):
        """Z2 swapping two of three points has orbits {0, 1} and {2}."""
        G = groupoids.validate_groupoid(constructors.action_groupoid(constructors.z2_groupoid(), 3, SWAP_01))
        report = groupoids.orbits_and_isotropy(G)
        assert report.orbits == [[0, 1], [2]]
        assert report.isotropy_orders() == [1, 1, 2]
        assert groupoids.orbit_of(G, 1) == [0, 1]

    def test_cech_groupoid(self, constructors, groupoids):
        """Two overlapping sets on three points give four objects and six arrows."""
        G = groupoids.validate_groupoid(constructors.cech_groupoid([[0, 1], [1, 2]], 3))
        assert (G.n_objects, G.n_arrows) == (4, 6)
        assert groupoids.orbits_and_isotropy(G).orbits == [[0], [1, 2], [3]]

    def test_gauge_groupoid(self, constructors, groupoids):
        """A free Z2-set of four points has gauge groupoid pair(2) x Z2."""
        data = constructors.gauge_groupoid(constructors.z2_groupoid(), 4, FREE_Z2)
        G = groupoids.validate_groupoid(data.groupoid)
        assert (G.n_objects, G.n_arrows) == (2, 8)
        assert data.to_base == [0, 0, 1, 1]

    def test_product_and_opposite(self, constructors, groupoids):
        """Products and opposites are groupoids; the opposite is an involution."""
        P = constructors.pair_groupoid(2)
        GG = groupoids.validate_groupoid(constructors.product_groupoid(P, constructors.z2_groupoid()))
        assert (GG.n_objects, GG.n_arrows) == (2, 8)
        S3 = constructors.named_group("S3")
        op = groupoids.validate_groupoid(constructors.opposite_groupoid(S3))
        assert constructors.opposite_groupoid(op).tables() == S3.tables()

    def test_full_subgroupoid(self, constructors, groupoids):
        """Restricting pair(3) to two objects gives pair(2)."""
        sub = constructors.full_subgroupoid(constructors.pair_groupoid(3), [0, 2])
        assert sub.tables() == constructors.pair_groupoid(2).tables()

    def test_shorthand(self, constructors):
        """Shorthand specs build the same tables as the direct constructors."""
        G = constructors.from_shorthand({"kind": "product", "factors": [{"kind": "pair", "n": 2}, {"kind": "group", "name": "Z2"}]})
        assert G.tables() == constructors.product_groupoid(constructors.pair_groupoid(2), constructors.z2_groupoid()).tables()

    def test_shorthand_errors(self, constructors):
        """Missing parameters and unknown kinds report a JSON path."""
        with pytest.raises(SchemaError) as missing:
            constructors.from_shorthand({"kind": "pair"})
        assert missing.value.path == "$.n"
        with pytest.raises(SchemaError) as unknown:
            constructors.from_shorthand({"kind": "torus"})
        assert unknown.value.path == "$.kind"


class TestConstructorErrors:
    """Constructors refuse data that is not a group, action or cover."""

    def test_not_a_group(self, constructors):
        """A table where 1 has no inverse is rejected with that element."""
        with pytest.raises(NotAGroup) as exc:
            constructors.group_groupoid([[0, 1], [1, 1]])
        assert exc.value.witness == 1

    def test_not_an_action(self, constructors):
        """(gh).x != g.(h.x) is reported with the failing triple."""
        with pytest.raises(NotAnAction) as exc:
            constructors.action_groupoid(constructors.z2_groupoid(), 2, [[0, 1], [0, 0]])
        assert exc.value.witness == [1, 1, 1]

    def test_action_point_out_of_range(self, constructors):
        """A point index outside 0..n-1 names its table cell."""
        with pytest.raises(SchemaError) as exc:
            constructors.action_groupoid(constructors.z2_groupoid(), 2, [[0, 1], [1, 2]])
        assert exc.value.path == "$.act[1][1]"
        assert exc.value.witness == {"arrow": 1, "point": 1, "value": 2}

    def test_not_a_cover(self, constructors):
        """A point outside every set is the witness."""
        with pytest.raises(NotACover) as exc:
            constructors.cech_groupoid([[0]], 2)
        assert exc.value.witness == 1

    def test_gauge_needs_free_action(self, constructors):
        """A fixed point of a non-identity element is rejected."""
        with pytest.raises(NotFree):
            constructors.gauge_groupoid(constructors.z2_groupoid(), 1, [[0, 0]])


class TestAxioms:
    """validate_groupoid names the first axiom that fails."""

    def test_empty(self, groupoids):
        """A groupoid needs an object."""
        empty = FiniteGroupoid(n_objects=0, src=(), tgt=(), compose=(), inv=(), unit=())
        with pytest.raises(EmptyGroupoid):
            groupoids.validate_groupoid(empty)

    def test_bad_unit(self, constructors, groupoids):
        """Declaring -1 the unit of Z2 breaks the unit law."""
        G = constructors.z2_groupoid().model_copy(update={"unit": (1,)})
        with pytest.raises(BadUnit):
            groupoids.validate_groupoid(G)

    def test_bad_inverse(self, constructors, groupoids):
        """An inverse table that is not an involution is rejected at the arrow."""
        G = constructors.z2_groupoid().model_copy(update={"inv": (0, 0)})
        with pytest.raises(BadInverse) as exc:
            groupoids.validate_groupoid(G)
        assert exc.value.witness == 1

    def test_missing_product(self, constructors, groupoids):
        """Dropping a composable pair is reported with that pair."""
        P = constructors.pair_groupoid(2)
        G = FiniteGroupoid(**{**P.model_dump(), "compose": P.compose[1:]})
        with pytest.raises(SourceTargetMismatch) as exc:
            groupoids.validate_groupoid(G)
        assert exc.value.witness == [0, 0]

    def test_index_out_of_range(self, constructors, groupoids):
        """Out-of-range arrows in compose are schema errors with a path."""
        P = constructors.pair_groupoid(2)
        G = FiniteGroupoid(**{**P.model_dump(), "compose": P.compose[:-1] + ((3, 3, 99),)})
        with pytest.raises(SchemaError) as exc:
            groupoids.validate_groupoid(G)
        assert exc.value.path.startswith("$.compose[")


class TestHaarSystems:
    """Right invariance means the weight depends only on the target."""

    def test_counting(self, constructors, counting):
        """The counting system weighs every arrow 1."""
        haar = counting(constructors.pair_groupoid(2))
        assert haar.weights == (1, 1, 1, 1)

    def test_target_weights_are_invariant(self, constructors, groupoids):
        """w = (1, 1, 2, 2) on pair(2) depends only on t(h)."""
        haar = groupoids.validate_haar(constructors.pair_groupoid(2), [1, 1, 2, 2])
        assert groupoids.normal_form(haar) == [Fraction(1), Fraction(2)]

    def test_source_weights_are_not(self, constructors, groupoids):
        """w = (1, 2, 1, 2) depends on the source and fails invariance."""
        with pytest.raises(NotInvariant):
            groupoids.validate_haar(constructors.pair_groupoid(2), [1, 2, 1, 2])

    def test_positive(self, constructors, groupoids):
        """Zero weights are rejected with the arrow."""
        with pytest.raises(NotPositive) as exc:
            groupoids.validate_haar(constructors.z2_groupoid(), [0, 0])
        assert exc.value.witness == 0

    def test_wrong_length(self, constructors, groupoids):
        """The weight list must match the arrows."""
        with pytest.raises(SchemaError):
            groupoids.validate_haar(constructors.z2_groupoid(), [1])

    def test_canonical_from_objects(self, constructors, groupoids):
        """canonical_haar spreads u over arrows by target."""
        haar = groupoids.canonical_haar(constructors.pair_groupoid(2), [Fraction(1, 2), 3])
        assert haar.weights == (Fraction(1, 2), Fraction(1, 2), 3, 3)
        assert haar.object_weights() == (Fraction(1, 2), 3)

    def test_product_haar(self, constructors, groupoids):
        """Weights multiply on the product groupoid."""
        P = constructors.pair_groupoid(2)
        first = groupoids.canonical_haar(P, [1, 2])
        second = groupoids.canonical_haar(P, [3, 5])
        product = groupoids.product_haar(first, second, constructors.product_groupoid(P, P))
        assert product.weights[0] == 3
        assert product.weights[15] == 10


class TestHomomorphisms:
    """Homomorphism checks, fully faithful and essentially surjective maps."""

    def test_standard_homs_are_valid(self, constructors, groupoids):
        """Identity, terminal, anchor and diagonal maps preserve composition."""
        G = constructors.action_groupoid(constructors.z2_groupoid(), 3, SWAP_01)
        for phi in (constructors.identity_hom(G), constructors.terminal_hom(G), constructors.anchor_hom(G), constructors.diagonal_hom(G)):
            groupoids.validate_hom(phi)

    def test_inclusion_of_a_full_subgroupoid(self, constructors, groupoids):
        """pair(2) inside pair(3) is fully faithful and essentially surjective."""
        phi = groupoids.validate_hom(constructors.inclusion_hom(constructors.pair_groupoid(3), [0, 2]))
        assert groupoids.is_fully_faithful(phi) is None
        assert groupoids.is_essentially_surjective(phi) is None

    def test_missed_orbit(self, constructors, groupoids):
        """Including one point of a discrete set misses the other orbit."""
        phi = constructors.inclusion_hom(constructors.unit_groupoid(2), [0])
        assert groupoids.is_essentially_surjective(phi) == [1]

    def test_cech_projection(self, constructors, groupoids):
        """The Cech groupoid of a cover is equivalent to the space."""
        phi = groupoids.validate_hom(constructors.cech_projection([[0, 1], [1, 2]], 3))
        assert groupoids.is_fully_faithful(phi) is None
        assert groupoids.is_essentially_surjective(phi) is None

    def test_natural_transformation(self, constructors, groupoids):
        """Units form a natural transformation id => id; a non-central arrow does not."""
        S3 = constructors.named_group("S3")
        identity = constructors.identity_hom(S3)
        assert groupoids.natural_transformation_check(identity, identity, [S3.unit[0]]) is None
        assert groupoids.natural_transformation_check(identity, identity, [1]) is not None
