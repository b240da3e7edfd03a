import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from app.core.exceptions import (
    ActionAssociativityError,
    ActionDomainError,
    ActionUnitError,
    AnchorEquivarianceError,
    CommutationFailure,
    NotBiprincipal,
    NotComposable,
    NotFree,
    NotPrincipal,
    ParentMismatch,
    SchemaError,
)
from app.core.union_find import UnionFind
from app.models.bibundle import Bibundle, Bijection, BiprincipalityCertificate, LawWitness, PrincipalityCertificate
from app.models.certificate import Certificate, failed, passed
from app.models.groupoid import FiniteGroupoid, GroupoidHom
from app.services.constructor_service import ConstructorService, Table
from app.services.groupoid_service import GroupoidService

logger = logging.getLogger(__name__)


class Composition(BaseModel):
    """P o_H Q with the orbit of every pair (p, q) of the fiber product."""

    model_config = {"arbitrary_types_allowed": True}

    bibundle: Bibundle
    pairs: List[Tuple[int, int]]
    orbit_of: Dict[Tuple[int, int], int]


def _bibundle(left, right, n_points, l, r, left_action, right_action, name="", point_labels=None) -> Bibundle:
    return Bibundle(
        left=left,
        right=right,
        n_points=n_points,
        l=tuple(l),
        r=tuple(r),
        left_action=tuple(left_action),
        right_action=tuple(right_action),
        name=name,
        point_labels=tuple(point_labels) if point_labels is not None else None,
    )


class BibundleService:
    """Finite bibundles: laws, principality, composition and 2-morphisms."""

    def __init__(self, groupoids: Optional[GroupoidService] = None, constructors: Optional[ConstructorService] = None):
        self.groupoids = groupoids or GroupoidService()
        self.constructors = constructors or ConstructorService()

    def validate_bibundle(self, P: Bibundle) -> Bibundle:
        """Brute-force check of the action, anchor and commutation laws."""
        G, H = P.left, P.right
        if len(P.l) != P.n_points or len(P.r) != P.n_points:
            raise SchemaError("anchors must list one object per point", "$.anchors")
        for p in range(P.n_points):
            if not 0 <= P.l[p] < G.n_objects or not 0 <= P.r[p] < H.n_objects:
                raise SchemaError("anchor out of range", f"$.anchors[{p}]")
        for name, table, n_arrows in (("left_action", P.left_action, G.n_arrows), ("right_action", P.right_action, H.n_arrows)):
            for i, (a, b, c) in enumerate(table):
                arrow, point = (a, b) if name == "left_action" else (b, a)
                if not 0 <= arrow < n_arrows or not 0 <= point < P.n_points or not 0 <= c < P.n_points:
                    raise SchemaError("action entry out of range", f"$.{name}[{i}]")
        lact, ract = P.lact, P.ract
        if len(lact) != len(P.left_action) or len(ract) != len(P.right_action):
            raise SchemaError("an action pair is listed twice", "$.actions")

        for (g, p), q in sorted(lact.items()):
            if G.src[g] != P.l[p]:
                raise ActionDomainError("g.p defined although s(g) != l(p)", [g, p])
            if P.l[q] != G.tgt[g] or P.r[q] != P.r[p]:
                raise AnchorEquivarianceError("l(g.p) != t(g) or r(g.p) != r(p)", [g, p])
        for p in range(P.n_points):
            for g in G.source_fibers[P.l[p]]:
                if (g, p) not in lact:
                    raise ActionDomainError("g.p undefined although s(g) = l(p)", [g, p])
            if lact[(G.unit[P.l[p]], p)] != p:
                raise ActionUnitError("1_{l(p)}.p != p", p)
        for (p, h), q in sorted(ract.items()):
            if H.tgt[h] != P.r[p]:
                raise ActionDomainError("p.h defined although t(h) != r(p)", [p, h])
            if P.r[q] != H.src[h] or P.l[q] != P.l[p]:
                raise AnchorEquivarianceError("r(p.h) != s(h) or l(p.h) != l(p)", [p, h])
        for p in range(P.n_points):
            for h in H.target_fibers[P.r[p]]:
                if (p, h) not in ract:
                    raise ActionDomainError("p.h undefined although t(h) = r(p)", [p, h])
            if ract[(p, H.unit[P.r[p]])] != p:
                raise ActionUnitError("p.1_{r(p)} != p", p)

        for (g, h), gh in sorted(G.mul_table.items()):
            for p in P.l_fibers[G.src[h]]:
                if lact[(gh, p)] != lact[(g, lact[(h, p)])]:
                    raise ActionAssociativityError("(gh).p != g.(h.p)", [g, h, p])
        for (h, k), hk in sorted(H.mul_table.items()):
            for p in P.r_fibers[H.tgt[h]]:
                if ract[(p, hk)] != ract[(ract[(p, h)], k)]:
                    raise ActionAssociativityError("p.(hk) != (p.h).k", [p, h, k])
        for (g, p), gp in sorted(lact.items()):
            for h in H.target_fibers[P.r[p]]:
                if ract[(gp, h)] != lact[(g, ract[(p, h)])]:
                    raise CommutationFailure("(g.p).h != g.(p.h)", [g, p, h])
        return P

    # Constructors

    def identity_bibundle(self, G: FiniteGroupoid) -> Bibundle:
        """P = G1, l = t, r = s, both actions by composition."""
        return _bibundle(
            G, G, G.n_arrows, G.tgt, G.src,
            [(g, p, gp) for (g, p), gp in G.mul_table.items()],
            [(p, h, ph) for (p, h), ph in G.mul_table.items()],
            name=f"id({G.name})",
            point_labels=[G.arrow_label(g) for g in range(G.n_arrows)],
        )

    def hom_bibundle(self, phi: GroupoidHom) -> Bibundle:
        """P = G0 x_{H0} H1 = {(x, h) : phi(x) = t(h)}, ordered by (x, h)."""
        G, H = phi.source, phi.target
        points = [(x, h) for x in range(G.n_objects) for h in H.target_fibers[phi.on_objects[x]]]
        index = {pt: i for i, pt in enumerate(points)}
        left_action = [
            (g, index[(x, h)], index[(G.tgt[g], H.mul(phi.on_arrows[g], h))])
            for x, h in points
            for g in G.source_fibers[x]
        ]
        right_action = [
            (index[(x, h)], k, index[(x, H.mul(h, k))])
            for x, h in points
            for k in H.target_fibers[H.src[h]]
        ]
        return _bibundle(
            G, H, len(points),
            [x for x, _ in points],
            [H.src[h] for _, h in points],
            left_action, right_action,
            name=f"P({phi.name})",
            point_labels=[f"({G.object_label(x)},{H.arrow_label(h)})" for x, h in points],
        )

    def terminal_bibundle(self, G: FiniteGroupoid) -> Bibundle:
        """G0 <- G0 -> *, the bibundle of G -> 1."""
        return self.hom_bibundle(self.constructors.terminal_hom(G))

    def diagonal_bibundle(self, G: FiniteGroupoid) -> Bibundle:
        return self.hom_bibundle(self.constructors.diagonal_hom(G))

    def anchor_bibundle(self, G: FiniteGroupoid) -> Bibundle:
        return self.hom_bibundle(self.constructors.anchor_hom(G))

    def point_bibundle(self, G: FiniteGroupoid, x: int) -> Bibundle:
        """* <- t^-1(x) -> G0, the bibundle of the point 1 -> G at x."""
        return self.hom_bibundle(self.constructors.point_hom(G, x))

    def principal_bundle_bibundle(self, group: FiniteGroupoid, n_points: int, act: Table) -> Bibundle:
        """G x| X <- X -> X/G for a free action; X/G is a unit groupoid on the orbits."""
        action = self.constructors.action_groupoid(group, n_points, act)
        orbits = self.groupoids.orbits_and_isotropy(action)
        for x, iso in orbits.isotropy.items():
            if len(iso) > 1:
                raise NotFree("the action has nontrivial isotropy", x)
        base = self.constructors.unit_groupoid(len(orbits.orbits))
        to_base = {x: i for i, orbit in enumerate(orbits.orbits) for x in orbit}
        return _bibundle(
            action, base, n_points, range(n_points), [to_base[x] for x in range(n_points)],
            [(g, action.src[g], action.tgt[g]) for g in range(action.n_arrows)],
            [(x, to_base[x], x) for x in range(n_points)],
            name="principal-bundle",
        )

    def gauge_bibundle(self, group: FiniteGroupoid, n_points: int, ract: Table) -> Bibundle:
        """X <- P -> * with the gauge groupoid on the left and the group on the right."""
        gauge, to_base, reps = self.constructors.gauge_groupoid(group, n_points, ract)
        left_action = []
        for a, (p, q) in enumerate(reps):
            for q2 in range(n_points):
                if to_base[q2] != to_base[q]:
                    continue
                g = next(g for g in range(group.n_arrows) if ract[q][g] == q2)
                left_action.append((a, q2, ract[p][g]))
        right_action = [(p, k, ract[p][k]) for p in range(n_points) for k in range(group.n_arrows)]
        return _bibundle(
            gauge, group, n_points, to_base, [0] * n_points, left_action, right_action, name="gauge",
        )

    def product_bibundle(self, P: Bibundle, Q: Bibundle) -> Bibundle:
        """P x Q between product groupoids; point (p, q) at p * |Q| + q."""
        G = self.constructors.product_groupoid(P.left, Q.left)
        H = self.constructors.product_groupoid(P.right, Q.right)
        m = Q.n_points
        mG, mH = Q.left.n_arrows, Q.right.n_arrows
        nG, nH = Q.left.n_objects, Q.right.n_objects
        points = [(p, q) for p in range(P.n_points) for q in range(m)]
        left_action = [
            (g1 * mG + g2, p1 * m + p2, q1 * m + q2)
            for (g1, p1), q1 in P.lact.items()
            for (g2, p2), q2 in Q.lact.items()
        ]
        right_action = [
            (p1 * m + p2, h1 * mH + h2, q1 * m + q2)
            for (p1, h1), q1 in P.ract.items()
            for (p2, h2), q2 in Q.ract.items()
        ]
        return _bibundle(
            G, H, len(points),
            [P.l[p] * nG + Q.l[q] for p, q in points],
            [P.r[p] * nH + Q.r[q] for p, q in points],
            left_action, right_action, name=f"{P.name}x{Q.name}",
        )

    def from_shorthand(self, shorthand: dict, path: str = "$") -> Bibundle:
        """Build a bibundle from {"kind": ..., params}; groupoid parameters use the groupoid shorthand."""
        C = self.constructors
        kind = shorthand.get("kind")

        def groupoid(key: str = "groupoid") -> FiniteGroupoid:
            return C.from_shorthand(shorthand[key], f"{path}.{key}")

        try:
            if kind == "identity":
                return self.identity_bibundle(groupoid())
            if kind == "terminal":
                return self.terminal_bibundle(groupoid())
            if kind == "diagonal":
                return self.diagonal_bibundle(groupoid())
            if kind == "anchor":
                return self.anchor_bibundle(groupoid())
            if kind == "point":
                return self.point_bibundle(groupoid(), int(shorthand["object"]))
            if kind == "inclusion":
                return self.hom_bibundle(C.inclusion_hom(groupoid(), shorthand["objects"]))
            if kind == "cech":
                return self.hom_bibundle(C.cech_projection(shorthand["cover"], int(shorthand["points"])))
            if kind == "gauge":
                return self.gauge_bibundle(C.group_from_param(shorthand["group"], f"{path}.group"), int(shorthand["points"]), shorthand["ract"])
            if kind == "principal_bundle":
                return self.principal_bundle_bibundle(C.group_from_param(shorthand["group"], f"{path}.group"), int(shorthand["points"]), shorthand["act"])
            if kind == "matrix":
                base = self.terminal_bibundle(C.pair_groupoid(int(shorthand["n"])))
                return self.product_bibundle(base, self.identity_bibundle(C.group_from_param(shorthand["group"], f"{path}.group")))
            if kind == "opposite":
                return self.opposite_bibundle(self.from_shorthand(shorthand["of"], f"{path}.of"))
            if kind == "product":
                first, second = shorthand["factors"]
                return self.product_bibundle(
                    self.from_shorthand(first, f"{path}.factors[0]"), self.from_shorthand(second, f"{path}.factors[1]")
                )
            if kind == "compose":
                first, second = shorthand["factors"]
                return self.compose_bibundles(
                    self.from_shorthand(first, f"{path}.factors[0]"), self.from_shorthand(second, f"{path}.factors[1]")
                )
        except KeyError as exc:
            raise SchemaError(f"missing bibundle parameter {exc.args[0]!r}", f"{path}.{exc.args[0]}")
        raise SchemaError(f"unknown bibundle kind {kind!r}", f"{path}.kind")

    # Principality

    def is_right_principal(self, P: Bibundle) -> PrincipalityCertificate:
        """l onto, and (p, h) -> (p, p.h) a bijection onto {(p, p') : l(p) = l(p')}."""
        H = P.right
        missing = next((x for x in range(P.left.n_objects) if not P.l_fibers[x]), None)
        l_onto = LawWitness(holds=missing is None, witness=None if missing is None else {"object": missing})
        injective = LawWitness(holds=True)
        surjective = LawWitness(holds=True)
        for p in range(P.n_points):
            seen: Dict[int, int] = {}
            for h in H.target_fibers[P.r[p]]:
                q = P.ract[(p, h)]
                if q in seen and injective.holds:
                    injective = LawWitness(holds=False, witness={"point": p, "arrows": [seen[q], h]})
                seen.setdefault(q, h)
            if surjective.holds:
                unreached = [q for q in P.l_fibers[P.l[p]] if q not in seen]
                if unreached:
                    surjective = LawWitness(holds=False, witness={"pair": [p, unreached[0]]})
        return PrincipalityCertificate(l_surjective=l_onto, char_map_injective=injective, char_map_surjective=surjective)

    def swap(self, P: Bibundle) -> Bibundle:
        """The H-G bibundle on the same points: h.p = p.h^-1, p.g = g^-1.p."""
        G, H = P.left, P.right
        return _bibundle(
            H, G, P.n_points, P.r, P.l,
            [(H.inv[h], p, q) for (p, h), q in P.ract.items()],
            [(p, G.inv[g], q) for (g, p), q in P.lact.items()],
            name=f"{P.name}^op",
            point_labels=P.point_labels,
        )

    def is_biprincipal(self, P: Bibundle) -> BiprincipalityCertificate:
        return BiprincipalityCertificate(right=self.is_right_principal(P), left=self.is_right_principal(self.swap(P)))

    def opposite_bibundle(self, P: Bibundle) -> Bibundle:
        certificate = self.is_biprincipal(P)
        if not certificate.passed:
            raise NotBiprincipal("opposite bibundle needs a biprincipal bibundle", certificate.model_dump())
        return self.swap(P)

    # Composition

    def composition(self, P: Bibundle, Q: Bibundle, permissive: bool = False) -> Composition:
        """Orbits of (p, q).h = (p.h, h^-1.q) on the fiber product, by union-find."""
        if P.right.tables() != Q.left.tables():
            raise NotComposable("right groupoid of P is not the left groupoid of Q", None)
        certificate = self.is_right_principal(P)
        if not certificate.passed:
            if not permissive:
                raise NotPrincipal("composition needs a right principal first factor", certificate.failures())
            logger.warning("composing non right principal bibundle %s in permissive mode", P.name)
        H = P.right
        pairs = [(p, q) for p in range(P.n_points) for q in Q.l_fibers[P.r[p]]]
        index = {pq: i for i, pq in enumerate(pairs)}
        uf = UnionFind(range(len(pairs)))
        for i, (p, q) in enumerate(pairs):
            for h in H.target_fibers[P.r[p]]:
                uf.union(i, index[(P.ract[(p, h)], Q.lact[(H.inv[h], q)])])
        classes = uf.reps()
        point_of = {rep: k for k, rep in enumerate(classes)}
        orbit_of = {pq: point_of[uf.find(i)] for i, pq in enumerate(pairs)}

        left_action: Dict[Tuple[int, int], int] = {}
        right_action: Dict[Tuple[int, int], int] = {}
        for (p, q), point in orbit_of.items():
            for g in P.left.source_fibers[P.l[p]]:
                image = orbit_of[(P.lact[(g, p)], q)]
                if left_action.setdefault((g, point), image) != image:
                    raise CommutationFailure("left action does not descend to the quotient", [g, p, q])
            for k in Q.right.target_fibers[Q.r[q]]:
                image = orbit_of[(p, Q.ract[(q, k)])]
                if right_action.setdefault((point, k), image) != image:
                    raise CommutationFailure("right action does not descend to the quotient", [p, q, k])
        reps = [pairs[rep] for rep in classes]
        composite = _bibundle(
            P.left, Q.right, len(classes),
            [P.l[p] for p, _ in reps],
            [Q.r[q] for _, q in reps],
            [(g, pt, img) for (g, pt), img in left_action.items()],
            [(pt, k, img) for (pt, k), img in right_action.items()],
            name=f"{P.name}o{Q.name}",
            point_labels=[f"[{P.point_label(p)},{Q.point_label(q)}]" for p, q in reps],
        )
        return Composition(bibundle=composite, pairs=pairs, orbit_of=orbit_of)

    def compose_bibundles(self, P: Bibundle, Q: Bibundle, permissive: bool = False) -> Bibundle:
        return self.composition(P, Q, permissive).bibundle

    # 2-morphisms

    def is_biequivariant(self, P: Bibundle, Q: Bibundle, mapping: Sequence[int]) -> Optional[dict]:
        """None if ``mapping`` is a biequivariant bijection P -> Q, else a witness."""
        if len(mapping) != P.n_points or sorted(mapping) != list(range(Q.n_points)):
            return {"reason": "not a bijection"}
        for p, q in enumerate(mapping):
            if P.l[p] != Q.l[q] or P.r[p] != Q.r[q]:
                return {"reason": "anchors", "point": p}
        for (g, p), gp in P.lact.items():
            if mapping[gp] != Q.lact[(g, mapping[p])]:
                return {"reason": "left action", "arrow": g, "point": p}
        for (p, h), ph in P.ract.items():
            if mapping[ph] != Q.ract[(mapping[p], h)]:
                return {"reason": "right action", "arrow": h, "point": p}
        return None

    def _signatures(self, P: Bibundle) -> List[tuple]:
        uf = UnionFind(range(P.n_points))
        for (g, p), q in P.lact.items():
            uf.union(p, q)
        for (p, h), q in P.ract.items():
            uf.union(p, q)
        size: Dict[int, int] = {}
        for p in range(P.n_points):
            size[uf.find(p)] = size.get(uf.find(p), 0) + 1
        out = []
        for p in range(P.n_points):
            left_stab = sum(1 for g in P.left.source_fibers[P.l[p]] if P.lact[(g, p)] == p)
            right_stab = sum(1 for h in P.right.target_fibers[P.r[p]] if P.ract[(p, h)] == p)
            out.append((P.l[p], P.r[p], left_stab, right_stab, size[uf.find(p)]))
        return out

    def find_biequivariant_iso(self, P: Bibundle, Q: Bibundle) -> Optional[Bijection]:
        """Backtracking over orbit representatives; a choice on one point fixes its whole orbit."""
        if P.left.tables() != Q.left.tables() or P.right.tables() != Q.right.tables():
            raise ParentMismatch("bibundles act by different groupoids", None)
        if P.n_points != Q.n_points:
            return None
        sig_p, sig_q = self._signatures(P), self._signatures(Q)
        if sorted(sig_p) != sorted(sig_q):
            return None

        def propagate(mapping: Dict[int, int], used: set, p: int, q: int) -> Optional[List[int]]:
            added = []
            queue = deque([(p, q)])
            while queue:
                a, b = queue.popleft()
                if a in mapping:
                    if mapping[a] != b:
                        return _undo(mapping, used, added)
                    continue
                if b in used or sig_p[a] != sig_q[b]:
                    return _undo(mapping, used, added)
                mapping[a] = b
                used.add(b)
                added.append(a)
                for g in P.left.source_fibers[P.l[a]]:
                    queue.append((P.lact[(g, a)], Q.lact[(g, b)]))
                for h in P.right.target_fibers[P.r[a]]:
                    queue.append((P.ract[(a, h)], Q.ract[(b, h)]))
            return added

        def _undo(mapping, used, added):
            for a in added:
                used.discard(mapping.pop(a))
            return None

        def search(mapping: Dict[int, int], used: set) -> bool:
            free = next((p for p in range(P.n_points) if p not in mapping), None)
            if free is None:
                return True
            for q in range(Q.n_points):
                if q in used or sig_q[q] != sig_p[free]:
                    continue
                added = propagate(mapping, used, free, q)
                if added is None:
                    continue
                if search(mapping, used):
                    return True
                _undo(mapping, used, added)
            return False

        mapping: Dict[int, int] = {}
        if not search(mapping, set()):
            return None
        result = [mapping[p] for p in range(P.n_points)]
        if self.is_biequivariant(P, Q, result) is not None:
            raise ArithmeticError("search produced a non-equivariant map")
        return Bijection(mapping=tuple(result))

    # Homomorphism criteria

    def hom_morita_shadow(self, phi: GroupoidHom) -> Certificate:
        """Fully faithful + essentially surjective, compared with biprincipality of P_phi."""
        faithful = self.groupoids.is_fully_faithful(phi)
        surjective = self.groupoids.is_essentially_surjective(phi)
        criterion = faithful is None and surjective is None
        biprincipal = self.is_biprincipal(self.hom_bibundle(phi)).passed
        details = {"fully_faithful": faithful is None, "essentially_surjective": surjective is None, "bibundle_biprincipal": biprincipal}
        if criterion != biprincipal:
            return failed("hom_morita_criterion", {"criterion": criterion, "biprincipal": biprincipal}, **details)
        return passed("hom_morita_criterion", is_morita=criterion, **details)

    def natural_equivalence_check(self, phi: GroupoidHom, psi: GroupoidHom, tau: Sequence[int]) -> Certificate:
        """tau natural, and P_phi, P_psi biequivariantly isomorphic."""
        bad = self.groupoids.natural_transformation_check(phi, psi, tau)
        if bad is not None:
            return failed("natural_equivalence", {"arrow": bad})
        iso = self.find_biequivariant_iso(self.hom_bibundle(phi), self.hom_bibundle(psi))
        if iso is None:
            return failed("natural_equivalence", {"reason": "no biequivariant isomorphism"})
        return passed("natural_equivalence", mapping=list(iso.mapping))
