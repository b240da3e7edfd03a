"""
Tests for finite bibundles: laws, principality, composition and 2-morphisms.
"""
import pytest

from app.core.exceptions import ActionDomainError, NotBiprincipal, NotComposable, NotPrincipal, SchemaError
from app.models.bibundle import Bibundle

FREE_Z2 = [[0, 1], [1, 0], [2, 3], [3, 2]]
CECH = {"kind": "cech", "points": 3, "cover": [[0, 1], [1, 2]]}


class TestLaws:
    """validate_bibundle checks actions, anchors and commutation."""

    def test_constructed_bibundles_are_lawful(self, constructors, bibundles):
        """Identity, hom, gauge and principal bundle bibundles satisfy every law."""
        P2 = constructors.pair_groupoid(2)
        Z2 = constructors.z2_groupoid()
        for P in (
            bibundles.identity_bibundle(constructors.named_group("S3")),
            bibundles.terminal_bibundle(P2),
            bibundles.point_bibundle(P2, 1),
            bibundles.anchor_bibundle(constructors.cech_groupoid([[0, 1], [1, 2]], 3)),
            bibundles.gauge_bibundle(Z2, 4, FREE_Z2),
            bibundles.principal_bundle_bibundle(Z2, 2, [[0, 1], [1, 0]]),
        ):
            bibundles.validate_bibundle(P)

    def test_missing_left_action(self, constructors, bibundles):
        """Dropping g.p for a composable pair is an action domain error."""
        P = bibundles.terminal_bibundle(constructors.z2_groupoid())
        broken = Bibundle(**{**P.model_dump(), "left_action": ((0, 0, 0),)})
        with pytest.raises(ActionDomainError) as exc:
            bibundles.validate_bibundle(broken)
        assert exc.value.witness == [1, 0]

    def test_anchor_out_of_range(self, constructors, bibundles):
        """Anchors outside the object set are schema errors."""
        P = bibundles.terminal_bibundle(constructors.z2_groupoid())
        broken = Bibundle(**{**P.model_dump(), "l": (3,)})
        with pytest.raises(SchemaError):
            bibundles.validate_bibundle(broken)


class TestPrincipality:
    """Right principality split into its three conditions."""

    def test_hom_bibundles_are_right_principal(self, constructors, bibundles):
        """Every homomorphism bibundle is right principal."""
        phi = constructors.terminal_hom(constructors.named_group("S3"))
        assert bibundles.is_right_principal(bibundles.hom_bibundle(phi)).passed

    def test_pair_groupoid_is_morita_trivial(self, constructors, bibundles):
        """pair(2) -> 1 is biprincipal."""
        assert bibundles.is_biprincipal(bibundles.terminal_bibundle(constructors.pair_groupoid(2))).passed

    def test_group_to_point_is_not(self, constructors, bibundles):
        """Z2 -> 1 fails injectivity of the characteristic map on the left."""
        certificate = bibundles.is_biprincipal(bibundles.terminal_bibundle(constructors.z2_groupoid()))
        assert certificate.right.passed
        assert certificate.left.failures() == ["char_map_injective"]
        assert certificate.left.char_map_injective.witness == {"point": 0, "arrows": [0, 1]}

    def test_opposite_needs_biprincipal(self, constructors, bibundles):
        """Only biprincipal bibundles have an opposite."""
        with pytest.raises(NotBiprincipal):
            bibundles.opposite_bibundle(bibundles.terminal_bibundle(constructors.z2_groupoid()))

    def test_opposite_swaps_sides(self, constructors, bibundles):
        """The opposite of pair(2) -> 1 goes from 1 to pair(2)."""
        P = bibundles.terminal_bibundle(constructors.pair_groupoid(2))
        op = bibundles.validate_bibundle(bibundles.opposite_bibundle(P))
        assert op.left.tables() == P.right.tables()
        assert op.right.tables() == P.left.tables()

    @pytest.mark.parametrize("build", [
        lambda c, b: b.identity_bibundle(c.pair_groupoid(2)),
        lambda c, b: b.terminal_bibundle(c.pair_groupoid(2)),
        lambda c, b: b.from_shorthand(CECH),
    ])
    def test_opposite_on_non_loop_arrows(self, constructors, bibundles, build):
        """Swapping sides inverts arrows that are not loops; twice gives back P."""
        P = build(constructors, bibundles)
        op = bibundles.validate_bibundle(bibundles.opposite_bibundle(P))
        assert op.l == P.r and op.r == P.l
        back = bibundles.validate_bibundle(bibundles.opposite_bibundle(op))
        assert back.tables() == P.tables()

    def test_opposite_action_tables(self, constructors, bibundles):
        """h.p on the opposite of id(pair(2)) is p.h^-1 on the original."""
        G = constructors.pair_groupoid(2)
        P = bibundles.identity_bibundle(G)
        op = bibundles.opposite_bibundle(P)
        for (h, p), q in op.lact.items():
            assert P.ract[(p, G.inv[h])] == q
        for (p, g), q in op.ract.items():
            assert P.lact[(G.inv[g], p)] == q

    @pytest.mark.parametrize("shorthand", [
        CECH,
        {"kind": "matrix", "n": 2, "group": "Z2"},
        {"kind": "gauge", "group": "Z2", "points": 4, "ract": FREE_Z2},
        {"kind": "inclusion", "groupoid": {"kind": "pair", "n": 3}, "objects": [1]},
    ])
    def test_shorthand_equivalences(self, bibundles, shorthand):
        """Shorthand Morita equivalences are biprincipal."""
        assert bibundles.is_biprincipal(bibundles.from_shorthand(shorthand)).passed

    def test_shorthand_errors(self, bibundles):
        """Missing parameters and unknown kinds carry their path."""
        with pytest.raises(SchemaError) as missing:
            bibundles.from_shorthand({"kind": "point", "groupoid": {"kind": "pair", "n": 2}})
        assert missing.value.path == "$.object"
        with pytest.raises(SchemaError) as nested:
            bibundles.from_shorthand({"kind": "identity", "groupoid": {"kind": "pair"}})
        assert nested.value.path == "$.groupoid.n"
        with pytest.raises(SchemaError) as unknown:
            bibundles.from_shorthand({"kind": "span"})
        assert unknown.value.path == "$.kind"


class TestComposition:
    """Composition as orbits of the fiber product."""

    def test_point_after_terminal(self, constructors, bibundles):
        """(1 <- pair(2)) o (pair(2) <- 1) collapses to the identity of 1."""
        G = constructors.pair_groupoid(2)
        composite = bibundles.compose_bibundles(bibundles.point_bibundle(G, 1), bibundles.terminal_bibundle(G))
        assert composite.tables() == bibundles.identity_bibundle(constructors.terminal_groupoid()).tables()

    def test_terminal_after_point(self, constructors, bibundles):
        """The other order is isomorphic to the identity bibundle of pair(2)."""
        G = constructors.pair_groupoid(2)
        composite = bibundles.validate_bibundle(
            bibundles.compose_bibundles(bibundles.terminal_bibundle(G), bibundles.point_bibundle(G, 0))
        )
        assert composite.n_points == 4
        assert bibundles.find_biequivariant_iso(composite, bibundles.identity_bibundle(G)) is not None

    def test_identity_is_neutral(self, constructors, bibundles):
        """id o P is isomorphic to P."""
        G = constructors.cech_groupoid([[0, 1], [1, 2]], 3)
        P = bibundles.anchor_bibundle(G)
        composite = bibundles.compose_bibundles(bibundles.identity_bibundle(G), P)
        assert bibundles.find_biequivariant_iso(composite, P) is not None

    def test_not_composable(self, constructors, bibundles):
        """The middle groupoids must agree."""
        with pytest.raises(NotComposable):
            bibundles.composition(
                bibundles.identity_bibundle(constructors.pair_groupoid(2)),
                bibundles.identity_bibundle(constructors.z2_groupoid()),
            )

    def test_first_factor_must_be_right_principal(self, constructors, bibundles):
        """Non principal first factors are refused unless permissive."""
        Z2 = constructors.z2_groupoid()
        P = bibundles.swap(bibundles.terminal_bibundle(Z2))
        with pytest.raises(NotPrincipal):
            bibundles.composition(P, bibundles.identity_bibundle(Z2))
        composite = bibundles.compose_bibundles(P, bibundles.identity_bibundle(Z2), permissive=True)
        assert composite.n_points == 1


class TestTwoMorphisms:
    """Biequivariant bijections and natural equivalences."""

    def test_is_biequivariant_rejects_non_bijections(self, constructors, bibundles):
        """A map that repeats a point is not a bijection."""
        P = bibundles.identity_bibundle(constructors.pair_groupoid(2))
        assert bibundles.is_biequivariant(P, P, [0, 0, 1, 2]) == {"reason": "not a bijection"}
        assert bibundles.is_biequivariant(P, P, [0, 1, 2, 3]) is None

    def test_identity_vs_hom_of_identity(self, constructors, bibundles):
        """The identity bibundle and the bibundle of id_G are isomorphic."""
        G = constructors.named_group("S3")
        iso = bibundles.find_biequivariant_iso(bibundles.identity_bibundle(G), bibundles.hom_bibundle(constructors.identity_hom(G)))
        assert iso is not None
        assert sorted(iso.mapping) == list(range(6))

    def test_non_isomorphic(self, constructors, bibundles):
        """Point bibundles at different objects of a discrete groupoid are not isomorphic."""
        X = constructors.unit_groupoid(2)
        assert bibundles.find_biequivariant_iso(bibundles.point_bibundle(X, 0), bibundles.point_bibundle(X, 1)) is None

    def test_hom_morita_shadow(self, constructors, bibundles):
        """The homomorphism criterion agrees with biprincipality in both directions."""
        inclusion = bibundles.hom_morita_shadow(constructors.inclusion_hom(constructors.pair_groupoid(3), [0, 2]))
        assert inclusion.passed and inclusion.details["is_morita"]
        collapse = bibundles.hom_morita_shadow(constructors.terminal_hom(constructors.z2_groupoid()))
        assert collapse.passed and not collapse.details["is_morita"]

    def test_natural_equivalence(self, constructors, bibundles):
        """Points 0 and 1 of pair(2) are naturally isomorphic through the arrow 0 -> 1."""
        G = constructors.pair_groupoid(2)
        phi, psi = constructors.point_hom(G, 0), constructors.point_hom(G, 1)
        certificate = bibundles.natural_equivalence_check(phi, psi, [2])
        assert certificate.passed
        failure = bibundles.natural_equivalence_check(phi, psi, [0])
        assert not failure.passed
