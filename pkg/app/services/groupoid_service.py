import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel

from app.core.exceptions import (
    BadInverse,
    BadUnit,
    EmptyGroupoid,
    NonAssociative,
    NotAHomomorphism,
    NotInvariant,
    NotPositive,
    SchemaError,
    SourceTargetMismatch,
)
from app.core.union_find import UnionFind
from app.models.groupoid import FiniteGroupoid, GroupoidHom, HaarSystem

logger = logging.getLogger(__name__)


class OrbitReport(BaseModel):
    """Orbit partition of G0 and the isotropy group at each object."""

    orbits: List[List[int]]
    isotropy: Dict[int, List[int]]

    def isotropy_orders(self) -> List[int]:
        return [len(self.isotropy[x]) for x in sorted(self.isotropy)]


def _fail(error_cls, message: str, witness):
    logger.debug("%s: %s (witness %s)", error_cls.__name__, message, witness)
    raise error_cls(message, witness)


class GroupoidService:
    """Axiom checks, Haar systems and orbit structure of finite groupoids."""

    def _check_indices(self, G: FiniteGroupoid) -> None:
        n, N = G.n_objects, len(G.src)
        if len(G.tgt) != N:
            raise SchemaError("tgt must list one object per arrow", "$.arrows")
        if len(G.inv) != N:
            raise SchemaError("inv must list one arrow per arrow", "$.inv")
        if len(G.unit) != n:
            raise SchemaError("unit must list one arrow per object", "$.unit")
        for name, table in (("src", G.src), ("tgt", G.tgt)):
            for g, x in enumerate(table):
                if not 0 <= x < n:
                    raise SchemaError(f"object index {x} out of range", f"$.arrows[{g}].{name}")
        for name, table in (("inv", G.inv), ("unit", G.unit)):
            for i, g in enumerate(table):
                if not 0 <= g < N:
                    raise SchemaError(f"arrow index {g} out of range", f"$.{name}[{i}]")
        seen = set()
        for i, triple in enumerate(G.compose):
            if any(not 0 <= a < N for a in triple):
                raise SchemaError("arrow index out of range", f"$.compose[{i}]")
            if triple[:2] in seen:
                raise SchemaError("pair composed twice", f"$.compose[{i}]")
            seen.add(triple[:2])

    def validate_groupoid(self, G: FiniteGroupoid) -> FiniteGroupoid:
        """Check every groupoid axiom; raise on the first failing witness."""
        if G.n_objects < 1:
            _fail(EmptyGroupoid, "a groupoid needs at least one object", None)
        self._check_indices(G)
        src, tgt, mul = G.src, G.tgt, G.mul_table

        for (g, h), gh in sorted(mul.items()):
            if src[g] != tgt[h]:
                _fail(SourceTargetMismatch, "composed pair is not composable", [g, h])
            if src[gh] != src[h] or tgt[gh] != tgt[g]:
                _fail(SourceTargetMismatch, "product has wrong source or target", [g, h])
        for g in range(G.n_arrows):
            for h in G.target_fibers[src[g]]:
                if (g, h) not in mul:
                    _fail(SourceTargetMismatch, "composable pair has no product", [g, h])

        for x, e in enumerate(G.unit):
            if src[e] != x or tgt[e] != x:
                _fail(BadUnit, "unit arrow is not a loop at its object", x)
        for g in range(G.n_arrows):
            if mul[(G.unit[tgt[g]], g)] != g:
                _fail(BadUnit, "left unit law fails", tgt[g])
            if mul[(g, G.unit[src[g]])] != g:
                _fail(BadUnit, "right unit law fails", src[g])

        for g, gi in enumerate(G.inv):
            if src[gi] != tgt[g] or tgt[gi] != src[g] or G.inv[gi] != g:
                _fail(BadInverse, "inverse has wrong endpoints or is not an involution", g)
            if mul[(g, gi)] != G.unit[tgt[g]] or mul[(gi, g)] != G.unit[src[g]]:
                _fail(BadInverse, "inverse law fails", g)

        for (g, h), gh in sorted(mul.items()):
            for k in G.target_fibers[src[h]]:
                if mul[(gh, k)] != mul[(g, mul[(h, k)])]:
                    _fail(NonAssociative, "(gh)k != g(hk)", [g, h, k])
        return G

    def counting_haar(self, G: FiniteGroupoid) -> HaarSystem:
        return HaarSystem(groupoid=G, weights=tuple(Fraction(1) for _ in range(G.n_arrows)))

    def validate_haar(self, G: FiniteGroupoid, weights: Sequence[Fraction]) -> HaarSystem:
        """Accept ``weights`` iff strictly positive and right invariant."""
        weights = tuple(Fraction(w) for w in weights)
        if len(weights) != G.n_arrows:
            raise SchemaError(f"expected {G.n_arrows} weights, got {len(weights)}", "$.weights")
        for h, w in enumerate(weights):
            if w <= 0:
                _fail(NotPositive, "Haar weights must be strictly positive", h)
        for (h, g), hg in sorted(G.mul_table.items()):
            if weights[hg] != weights[h]:
                _fail(NotInvariant, "w(hg) != w(h)", [h, g])
        return HaarSystem(groupoid=G, weights=weights)

    def canonical_haar(self, G: FiniteGroupoid, u: Sequence[Fraction]) -> HaarSystem:
        """Normal form w(h) = u(t(h)) for a positive object function u."""
        if len(u) != G.n_objects:
            raise SchemaError(f"expected {G.n_objects} object weights", "$.u")
        return self.validate_haar(G, [Fraction(u[G.tgt[h]]) for h in range(G.n_arrows)])

    def normal_form(self, haar: HaarSystem) -> List[Fraction]:
        """The object function u with w(h) = u(t(h))."""
        return list(haar.object_weights())

    def product_haar(self, first: HaarSystem, second: HaarSystem, product: FiniteGroupoid) -> HaarSystem:
        """w((g, h)) = w(g) w(h) on the product groupoid (arrow index g * |H1| + h)."""
        m = second.groupoid.n_arrows
        weights = [first.weights[k // m] * second.weights[k % m] for k in range(product.n_arrows)]
        return self.validate_haar(product, weights)

    def orbits_and_isotropy(self, G: FiniteGroupoid) -> OrbitReport:
        uf = UnionFind(range(G.n_objects))
        for g in range(G.n_arrows):
            uf.union(G.src[g], G.tgt[g])
        orbits = list(uf.classes().values())
        isotropy = {x: [g for g in G.source_fibers[x] if G.tgt[g] == x] for x in range(G.n_objects)}
        return OrbitReport(orbits=orbits, isotropy=isotropy)

    def orbit_of(self, G: FiniteGroupoid, x: int) -> List[int]:
        return next(orbit for orbit in self.orbits_and_isotropy(G).orbits if x in orbit)

    def validate_hom(self, phi: GroupoidHom) -> GroupoidHom:
        G, H = phi.source, phi.target
        f0, f1 = phi.on_objects, phi.on_arrows
        if len(f0) != G.n_objects or len(f1) != G.n_arrows:
            raise SchemaError("homomorphism tables have the wrong length", "$.hom")
        for g in range(G.n_arrows):
            if H.src[f1[g]] != f0[G.src[g]] or H.tgt[f1[g]] != f0[G.tgt[g]]:
                _fail(NotAHomomorphism, "arrow map does not cover the object map", g)
            if f1[G.inv[g]] != H.inv[f1[g]]:
                _fail(NotAHomomorphism, "inverses are not preserved", g)
        for x in range(G.n_objects):
            if f1[G.unit[x]] != H.unit[f0[x]]:
                _fail(NotAHomomorphism, "units are not preserved", x)
        for (g, h), gh in sorted(G.mul_table.items()):
            if f1[gh] != H.mul(f1[g], f1[h]):
                _fail(NotAHomomorphism, "composition is not preserved", [g, h])
        return phi

    def is_fully_faithful(self, phi: GroupoidHom) -> Optional[list]:
        """None if phi is bijective on every hom-set, else a witness pair of objects."""
        G, H = phi.source, phi.target
        for x in range(G.n_objects):
            for y in range(G.n_objects):
                image = sorted(phi.on_arrows[g] for g in G.hom_set(x, y))
                target = sorted(H.hom_set(phi.on_objects[x], phi.on_objects[y]))
                if image != target:
                    return [x, y]
        return None

    def is_essentially_surjective(self, phi: GroupoidHom) -> Optional[List[int]]:
        """None if every orbit of the target meets the image, else a missed orbit."""
        hit = set(phi.on_objects)
        for orbit in self.orbits_and_isotropy(phi.target).orbits:
            if not hit.intersection(orbit):
                return orbit
        return None

    def natural_transformation_check(self, phi: GroupoidHom, psi: GroupoidHom, tau: Sequence[int]) -> Optional[int]:
        """None if tau_{t(g)} phi(g) = psi(g) tau_{s(g)} for all g, else a failing arrow."""
        G, H = phi.source, phi.target
        for x in range(G.n_objects):
            arrow = tau[x]
            if H.src[arrow] != phi.on_objects[x] or H.tgt[arrow] != psi.on_objects[x]:
                return G.unit[x]
        for g in range(G.n_arrows):
            left = H.mul(tau[G.tgt[g]], phi.on_arrows[g])
            right = H.mul(psi.on_arrows[g], tau[G.src[g]])
            if left != right:
                return g
        return None
