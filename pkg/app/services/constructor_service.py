"""Example groupoids and homomorphisms.

Every constructor fixes its index order (documented per method) so that
serialized output is reproducible.
"""
import itertools
import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

from app.core.exceptions import NotACover, NotAGroup, NotAnAction, NotFree, NotPrincipal, SchemaError
from app.core.union_find import UnionFind
from app.models.groupoid import FiniteGroupoid, GroupoidHom

logger = logging.getLogger(__name__)

Table = Sequence[Sequence[int]]


class GaugeData(NamedTuple):
    groupoid: FiniteGroupoid
    to_base: List[int]
    arrow_reps: List[Tuple[int, int]]


def _groupoid(n_objects, src, tgt, compose, inv, unit, name="", arrow_labels=None, object_labels=None) -> FiniteGroupoid:
    return FiniteGroupoid(
        n_objects=n_objects,
        src=tuple(src),
        tgt=tuple(tgt),
        compose=tuple(compose),
        inv=tuple(inv),
        unit=tuple(unit),
        name=name,
        arrow_labels=tuple(arrow_labels) if arrow_labels is not None else None,
        object_labels=tuple(object_labels) if object_labels is not None else None,
    )


def cyclic_table(q: int) -> List[List[int]]:
    """Cayley table of Z_q on 0..q-1."""
    return [[(a + b) % q for b in range(q)] for a in range(q)]


def symmetric_table(n: int) -> Tuple[List[List[int]], List[str]]:
    """Cayley table of S_n; permutations in lexicographic order, (s t)(i) = s(t(i))."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(s[t[i]] for i in range(n))] for t in perms] for s in perms]
    return table, ["".join(str(i + 1) for i in p) for p in perms]


def _group_structure(table: Table) -> Tuple[int, List[int]]:
    """Identity and inverse list of a Cayley table, or NotAGroup."""
    n = len(table)
    if n == 0:
        raise NotAGroup("a group needs at least one element", None)
    for a, row in enumerate(table):
        if len(row) != n or any(not 0 <= c < n for c in row):
            raise NotAGroup("table is not closed", a)
    identity = next((e for e in range(n) if all(table[e][a] == a and table[a][e] == a for a in range(n))), None)
    if identity is None:
        raise NotAGroup("no identity element", None)
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise NotAGroup("table is not associative", [a, b, c])
    inverse = []
    for a in range(n):
        b = next((b for b in range(n) if table[a][b] == identity and table[b][a] == identity), None)
        if b is None:
            raise NotAGroup("element has no inverse", a)
        inverse.append(b)
    return identity, inverse


class ConstructorService:
    """Pair, group, action, Cech, product and gauge groupoids; standard homomorphisms."""

    def terminal_groupoid(self) -> FiniteGroupoid:
        return _groupoid(1, [0], [0], [(0, 0, 0)], [0], [0], name="terminal", arrow_labels=["1"], object_labels=["*"])

    def unit_groupoid(self, n: int, labels: Optional[Sequence[str]] = None) -> FiniteGroupoid:
        """The set {0..n-1} with identity arrows only."""
        labels = list(labels) if labels is not None else [str(x + 1) for x in range(n)]
        return _groupoid(
            n, range(n), range(n), [(x, x, x) for x in range(n)], range(n), range(n),
            name=f"unit({n})", arrow_labels=[f"1_{a}" for a in labels], object_labels=labels,
        )

    def pair_groupoid(self, n: int) -> FiniteGroupoid:
        """Arrows (x, y) at index x * n + y, target x, source y."""
        if n < 1:
            raise SchemaError("pair groupoid needs n >= 1", "$.n")
        arrows = [(x, y) for x in range(n) for y in range(n)]
        compose = [(x * n + y, y * n + z, x * n + z) for x in range(n) for y in range(n) for z in range(n)]
        return _groupoid(
            n,
            [y for _, y in arrows],
            [x for x, _ in arrows],
            compose,
            [y * n + x for x, y in arrows],
            [x * n + x for x in range(n)],
            name=f"pair({n})",
            arrow_labels=[f"({x + 1},{y + 1})" for x, y in arrows],
            object_labels=[str(x + 1) for x in range(n)],
        )

    def group_groupoid(self, table: Table, labels: Optional[Sequence[str]] = None, name: str = "group") -> FiniteGroupoid:
        """One object; arrow a is the group element a, compose(a, b) = table[a][b]."""
        identity, inverse = _group_structure(table)
        n = len(table)
        return _groupoid(
            1, [0] * n, [0] * n,
            [(a, b, table[a][b]) for a in range(n) for b in range(n)],
            inverse, [identity], name=name,
            arrow_labels=list(labels) if labels is not None else None, object_labels=["*"],
        )

    def z2_groupoid(self) -> FiniteGroupoid:
        """*//Z2 with arrows 1 (index 0) and -1 (index 1)."""
        return self.group_groupoid(cyclic_table(2), ["1", "-1"], name="Z2")

    def action_groupoid(self, group: FiniteGroupoid, n_points: int, act: Table, point_labels: Optional[Sequence[str]] = None) -> FiniteGroupoid:
        """Arrows (g, x) at index g * n_points + x, source x, target g.x."""
        if group.n_objects != 1:
            raise NotAGroup("acting groupoid must have one object", group.n_objects)
        e = group.unit[0]
        if len(act) != group.n_arrows or any(len(row) != n_points for row in act):
            raise NotAnAction("action table has the wrong shape", None)
        for g, row in enumerate(act):
            for x, y in enumerate(row):
                if not 0 <= y < n_points:
                    raise SchemaError(f"point index {y} out of range", f"$.act[{g}][{x}]", {"arrow": g, "point": x, "value": y})
        for x in range(n_points):
            if act[e][x] != x:
                raise NotAnAction("identity does not act trivially", x)
        for (g, h), gh in sorted(group.mul_table.items()):
            for x in range(n_points):
                if act[gh][x] != act[g][act[h][x]]:
                    raise NotAnAction("(gh).x != g.(h.x)", [g, h, x])
        n = n_points
        arrows = [(g, x) for g in range(group.n_arrows) for x in range(n)]
        compose = []
        for g, h in group.mul_table:
            for x in range(n):
                compose.append((g * n + act[h][x], h * n + x, group.mul(g, h) * n + x))
        labels = list(point_labels) if point_labels is not None else [str(x + 1) for x in range(n)]
        return _groupoid(
            n,
            [x for _, x in arrows],
            [act[g][x] for g, x in arrows],
            compose,
            [group.inv[g] * n + act[g][x] for g, x in arrows],
            [e * n + x for x in range(n)],
            name=f"{group.name or 'G'} x| X",
            arrow_labels=[f"({group.arrow_label(g)},{labels[x]})" for g, x in arrows],
            object_labels=labels,
        )

    def cech_groupoid(self, cover: Sequence[Sequence[int]], n_points: int, point_labels: Optional[Sequence[str]] = None) -> FiniteGroupoid:
        """Objects (i, x), x in U_i; arrows (i, j, x) with source (j, x), target (i, x)."""
        sets = [sorted(set(U)) for U in cover]
        covered = set().union(*sets) if sets else set()
        if not sets or covered != set(range(n_points)):
            missing = sorted(set(range(n_points)) - covered)
            raise NotACover("the sets do not cover X", missing[0] if missing else None)
        labels = list(point_labels) if point_labels is not None else [str(x + 1) for x in range(n_points)]
        objects = [(i, x) for i, U in enumerate(sets) for x in U]
        obj_index = {o: k for k, o in enumerate(objects)}
        arrows = [
            (i, j, x)
            for i, Ui in enumerate(sets)
            for j, Uj in enumerate(sets)
            for x in sorted(set(Ui) & set(Uj))
        ]
        index = {a: k for k, a in enumerate(arrows)}
        compose = [
            (index[(i, j, x)], index[(j2, k, x2)], index[(i, k, x)])
            for (i, j, x) in arrows
            for (j2, k, x2) in arrows
            if j2 == j and x2 == x
        ]
        return _groupoid(
            len(objects),
            [obj_index[(j, x)] for i, j, x in arrows],
            [obj_index[(i, x)] for i, j, x in arrows],
            compose,
            [index[(j, i, x)] for i, j, x in arrows],
            [index[(i, i, x)] for i, x in objects],
            name="cech",
            arrow_labels=[f"({i + 1},{j + 1},{labels[x]})" for i, j, x in arrows],
            object_labels=[f"({i + 1},{labels[x]})" for i, x in objects],
        )

    def product_groupoid(self, G: FiniteGroupoid, H: FiniteGroupoid) -> FiniteGroupoid:
        """Objects (x, y) at x * |H0| + y; arrows (g, h) at g * |H1| + h."""
        n, m = H.n_objects, H.n_arrows
        pairs = [(g, h) for g in range(G.n_arrows) for h in range(m)]
        compose = [
            (g1 * m + h1, g2 * m + h2, g12 * m + h12)
            for (g1, g2), g12 in G.mul_table.items()
            for (h1, h2), h12 in H.mul_table.items()
        ]
        return _groupoid(
            G.n_objects * n,
            [G.src[g] * n + H.src[h] for g, h in pairs],
            [G.tgt[g] * n + H.tgt[h] for g, h in pairs],
            compose,
            [G.inv[g] * m + H.inv[h] for g, h in pairs],
            [G.unit[x] * m + H.unit[y] for x in range(G.n_objects) for y in range(n)],
            name=f"{G.name}x{H.name}",
            arrow_labels=[f"({G.arrow_label(g)},{H.arrow_label(h)})" for g, h in pairs],
            object_labels=[f"({G.object_label(x)},{H.object_label(y)})" for x in range(G.n_objects) for y in range(n)],
        )

    def disjoint_union(self, G: FiniteGroupoid, H: FiniteGroupoid) -> FiniteGroupoid:
        """G's objects and arrows first, then H's shifted past them."""
        n, N = G.n_objects, G.n_arrows
        return _groupoid(
            n + H.n_objects,
            list(G.src) + [x + n for x in H.src],
            list(G.tgt) + [x + n for x in H.tgt],
            list(G.compose) + [(a + N, b + N, c + N) for a, b, c in H.compose],
            list(G.inv) + [g + N for g in H.inv],
            list(G.unit) + [g + N for g in H.unit],
            name=f"{G.name}+{H.name}",
            arrow_labels=[G.arrow_label(g) for g in range(N)] + [H.arrow_label(h) + "'" for h in range(H.n_arrows)],
            object_labels=[G.object_label(x) for x in range(n)] + [H.object_label(y) + "'" for y in range(H.n_objects)],
        )

    def opposite_groupoid(self, G: FiniteGroupoid) -> FiniteGroupoid:
        """Same arrows with source and target swapped; g .op h = h g."""
        return _groupoid(
            G.n_objects, G.tgt, G.src,
            [(h, g, gh) for (g, h), gh in G.mul_table.items()],
            G.inv, G.unit, name=G.name,
            arrow_labels=G.arrow_labels, object_labels=G.object_labels,
        )

    def full_subgroupoid(self, G: FiniteGroupoid, objects: Sequence[int]) -> FiniteGroupoid:
        """Objects in increasing order; arrows between them in G's order."""
        keep = sorted(set(objects))
        obj_index = {x: k for k, x in enumerate(keep)}
        arrows = [g for g in range(G.n_arrows) if G.src[g] in obj_index and G.tgt[g] in obj_index]
        index = {g: k for k, g in enumerate(arrows)}
        return _groupoid(
            len(keep),
            [obj_index[G.src[g]] for g in arrows],
            [obj_index[G.tgt[g]] for g in arrows],
            [(index[g], index[h], index[gh]) for (g, h), gh in G.mul_table.items() if g in index and h in index],
            [index[G.inv[g]] for g in arrows],
            [index[G.unit[x]] for x in keep],
            name=G.name,
            arrow_labels=[G.arrow_label(g) for g in arrows] if G.arrow_labels else None,
            object_labels=[G.object_label(x) for x in keep] if G.object_labels else None,
        )

    def gauge_groupoid(self, group: FiniteGroupoid, n_points: int, ract: Table, projection: Optional[Sequence[int]] = None) -> GaugeData:
        """(P x P)/G for a free right G-set P, with P -> X and a representative (p, q) per arrow.

        Arrow [p, q] goes from the orbit of q to the orbit of p; arrows and
        objects are ordered by their smallest representative.
        """
        _check_right_action(group, n_points, ract)
        e = group.unit[0]
        for p in range(n_points):
            for g in range(group.n_arrows):
                if g != e and ract[p][g] == p:
                    raise NotFree("a non-identity element fixes a point", [p, g])
        orbits = UnionFind(range(n_points))
        for p in range(n_points):
            for g in range(group.n_arrows):
                orbits.union(p, ract[p][g])
        reps = orbits.reps()
        to_base = [reps.index(orbits.find(p)) for p in range(n_points)]
        if projection is not None:
            if len(projection) != n_points:
                raise NotPrincipal("projection has the wrong length", None)
            for p in range(n_points):
                for q in range(n_points):
                    if (projection[p] == projection[q]) != (to_base[p] == to_base[q]):
                        raise NotPrincipal("fibers of the projection are not the G-orbits", [p, q])
            base_index = {}
            for p in range(n_points):
                base_index.setdefault(projection[p], to_base[p])
            if sorted(base_index) != list(range(len(reps))):
                raise NotPrincipal("projection is not onto its base", sorted(base_index))

        P = n_points
        pairs = UnionFind(range(P * P))
        for p in range(P):
            for q in range(P):
                for g in range(group.n_arrows):
                    pairs.union(p * P + q, ract[p][g] * P + ract[q][g])
        classes = pairs.reps()
        arrow_of = {c: k for k, c in enumerate(classes)}

        def cls(p: int, q: int) -> int:
            return arrow_of[pairs.find(p * P + q)]

        def translate(q: int, q2: int) -> int:
            return next(g for g in range(group.n_arrows) if ract[q][g] == q2)

        reps_pq = [divmod(c, P) for c in classes]
        compose = []
        for a, (p, q) in enumerate(reps_pq):
            for b, (q2, r) in enumerate(reps_pq):
                if to_base[q] != to_base[q2]:
                    continue
                g = translate(q, q2)
                compose.append((a, b, cls(p, ract[r][group.inv[g]])))
        unit = [cls(rep, rep) for rep in reps]
        G = _groupoid(
            len(reps),
            [to_base[q] for _, q in reps_pq],
            [to_base[p] for p, _ in reps_pq],
            compose,
            [cls(q, p) for p, q in reps_pq],
            unit,
            name="gauge",
            arrow_labels=[f"[{p + 1},{q + 1}]" for p, q in reps_pq],
            object_labels=[f"[{rep + 1}]" for rep in reps],
        )
        return GaugeData(groupoid=G, to_base=to_base, arrow_reps=reps_pq)

    def relabel_groupoid(self, G: FiniteGroupoid, object_perm: Sequence[int], arrow_perm: Sequence[int]) -> FiniteGroupoid:
        """Move object x to object_perm[x] and arrow g to arrow_perm[g]."""
        n, N = G.n_objects, G.n_arrows
        src, tgt, inv = [0] * N, [0] * N, [0] * N
        unit = [0] * n
        for g in range(N):
            src[arrow_perm[g]] = object_perm[G.src[g]]
            tgt[arrow_perm[g]] = object_perm[G.tgt[g]]
            inv[arrow_perm[g]] = arrow_perm[G.inv[g]]
        for x in range(n):
            unit[object_perm[x]] = arrow_perm[G.unit[x]]
        compose = [(arrow_perm[g], arrow_perm[h], arrow_perm[gh]) for (g, h), gh in G.mul_table.items()]
        return _groupoid(n, src, tgt, compose, inv, unit, name=G.name)

    # Shorthand documents

    def named_group(self, name: str) -> FiniteGroupoid:
        """"Z<q>" or "S<n>" as a one-object groupoid."""
        if name == "Z2":
            return self.z2_groupoid()
        if len(name) > 1 and name[0] in "ZS" and name[1:].isdigit():
            n = int(name[1:])
            if name[0] == "Z":
                return self.group_groupoid(cyclic_table(n), name=name)
            table, labels = symmetric_table(n)
            return self.group_groupoid(table, labels, name=name)
        raise SchemaError(f"unknown group {name!r}", "$.group")

    def from_shorthand(self, shorthand: dict, path: str = "$") -> FiniteGroupoid:
        """Build a groupoid from {"kind": ..., params}; nested shorthands carry their own path."""
        kind = shorthand.get("kind")
        try:
            if kind == "terminal":
                return self.terminal_groupoid()
            if kind == "unit":
                return self.unit_groupoid(int(shorthand["n"]))
            if kind == "pair":
                return self.pair_groupoid(int(shorthand["n"]))
            if kind == "group":
                if "table" in shorthand:
                    return self.group_groupoid(shorthand["table"], shorthand.get("labels"), name=shorthand.get("name", "group"))
                return self.named_group(shorthand["name"])
            if kind == "action":
                group = self.group_from_param(shorthand["group"], f"{path}.group")
                return self.action_groupoid(group, int(shorthand["points"]), shorthand["act"])
            if kind == "cech":
                return self.cech_groupoid(shorthand["cover"], int(shorthand["points"]))
            if kind == "product":
                first, second = shorthand["factors"]
                return self.product_groupoid(self.from_shorthand(first, f"{path}.factors[0]"), self.from_shorthand(second, f"{path}.factors[1]"))
            if kind == "union":
                first, second = shorthand["parts"]
                return self.disjoint_union(self.from_shorthand(first, f"{path}.parts[0]"), self.from_shorthand(second, f"{path}.parts[1]"))
            if kind == "gauge":
                group = self.group_from_param(shorthand["group"], f"{path}.group")
                return self.gauge_groupoid(group, int(shorthand["points"]), shorthand["ract"]).groupoid
        except KeyError as exc:
            raise SchemaError(f"missing constructor parameter {exc.args[0]!r}", f"{path}.{exc.args[0]}")
        raise SchemaError(f"unknown constructor kind {kind!r}", f"{path}.kind")

    def group_from_param(self, value, path: str) -> FiniteGroupoid:
        if isinstance(value, str):
            return self.named_group(value)
        return self.from_shorthand(value, path)

    # Homomorphisms

    def identity_hom(self, G: FiniteGroupoid) -> GroupoidHom:
        return GroupoidHom(source=G, target=G, on_objects=tuple(range(G.n_objects)), on_arrows=tuple(range(G.n_arrows)), name="id")

    def terminal_hom(self, G: FiniteGroupoid) -> GroupoidHom:
        return GroupoidHom(
            source=G, target=self.terminal_groupoid(),
            on_objects=(0,) * G.n_objects, on_arrows=(0,) * G.n_arrows, name="terminal",
        )

    def point_hom(self, G: FiniteGroupoid, x: int) -> GroupoidHom:
        """The point 1 -> G at object x."""
        return GroupoidHom(source=self.terminal_groupoid(), target=G, on_objects=(x,), on_arrows=(G.unit[x],), name=f"point({x})")

    def diagonal_hom(self, G: FiniteGroupoid) -> GroupoidHom:
        GG = self.product_groupoid(G, G)
        n, m = G.n_objects, G.n_arrows
        return GroupoidHom(
            source=G, target=GG,
            on_objects=tuple(x * n + x for x in range(n)),
            on_arrows=tuple(g * m + g for g in range(m)),
            name="diagonal",
        )

    def anchor_hom(self, G: FiniteGroupoid) -> GroupoidHom:
        """g -> (t(g), s(g)) in the pair groupoid of G0."""
        n = G.n_objects
        return GroupoidHom(
            source=G, target=self.pair_groupoid(n),
            on_objects=tuple(range(n)),
            on_arrows=tuple(G.tgt[g] * n + G.src[g] for g in range(G.n_arrows)),
            name="anchor",
        )

    def inclusion_hom(self, G: FiniteGroupoid, objects: Sequence[int]) -> GroupoidHom:
        keep = sorted(set(objects))
        sub = self.full_subgroupoid(G, keep)
        arrows = [g for g in range(G.n_arrows) if G.src[g] in keep and G.tgt[g] in keep]
        return GroupoidHom(source=sub, target=G, on_objects=tuple(keep), on_arrows=tuple(arrows), name="inclusion")

    def cech_projection(self, cover: Sequence[Sequence[int]], n_points: int) -> GroupoidHom:
        """C(U) -> X, (i, j, x) -> 1_x."""
        C = self.cech_groupoid(cover, n_points)
        X = self.unit_groupoid(n_points)
        sets = [sorted(set(U)) for U in cover]
        objects = [x for U in sets for x in U]
        arrows = [x for Ui in sets for Uj in sets for x in sorted(set(Ui) & set(Uj))]
        return GroupoidHom(source=C, target=X, on_objects=tuple(objects), on_arrows=tuple(arrows), name="cech")


def _check_right_action(group: FiniteGroupoid, n_points: int, ract: Table) -> None:
    e = group.unit[0]
    if len(ract) != n_points or any(len(row) != group.n_arrows for row in ract):
        raise NotAnAction("right action table has the wrong shape", None)
    for p in range(n_points):
        if ract[p][e] != p:
            raise NotAnAction("identity does not act trivially", p)
        for (g, h), gh in group.mul_table.items():
            if ract[ract[p][g]][h] != ract[p][gh]:
                raise NotAnAction("(p.g).h != p.(gh)", [p, g, h])
