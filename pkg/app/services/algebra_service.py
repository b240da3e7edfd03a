import logging
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel

from app.core import linalg
from app.core.exceptions import DimensionMismatch, ParentMismatch
from app.core.linalg import EchelonBasis, LinearMap, SparseVec
from app.core.scalars import ONE, ZERO, conj, from_fraction, gaussian
from app.models.algebra import Algebra, AlgebraElement, StructureConstants
from app.models.certificate import Certificate, failed, passed
from app.models.groupoid import FiniteGroupoid, HaarSystem
from app.services.constructor_service import ConstructorService
from app.services.groupoid_service import GroupoidService

logger = logging.getLogger(__name__)

SIDES = ("left", "right", "bimodule")


class SeparabilityResult(BaseModel):
    """A checked section of multiplication, or a proof that none exists."""

    side: str
    found: bool
    section: Optional[Dict[int, Dict[int, object]]] = None
    note: str = ""

    model_config = {"arbitrary_types_allowed": True}


class TensorIsoResult(BaseModel):
    model_config = {"arbitrary_types_allowed": True}

    product: FiniteGroupoid
    product_haar: HaarSystem
    mapping: Dict[int, Dict[int, object]]
    certificate: Certificate


def identity_map(dim: int) -> LinearMap:
    return {i: {i: ONE} for i in range(dim)}


def apply_map(f: LinearMap, vec: SparseVec) -> SparseVec:
    out: SparseVec = {}
    for i, c in vec.items():
        linalg.axpy(out, c, f.get(i, {}))
    return out


class AlgebraService:
    """Convolution algebras A(G) and exact certificates about them."""

    def __init__(self, groupoids: Optional[GroupoidService] = None, constructors: Optional[ConstructorService] = None):
        self.groupoids = groupoids or GroupoidService()
        self.constructors = constructors or ConstructorService()

    # Elements

    def element(self, haar: HaarSystem, vec: SparseVec) -> AlgebraElement:
        return AlgebraElement.from_sparse(haar, vec)

    def delta(self, haar: HaarSystem, g: int, coeff=ONE) -> AlgebraElement:
        return self.element(haar, {g: coeff})

    def convolve(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        """(a*b)(g) = sum over s(h) = s(g) of a(g h^-1) b(h) w(h)."""
        if a.haar.key() != b.haar.key():
            raise ParentMismatch("elements belong to different convolution algebras", None)
        G, w = a.groupoid, a.haar.scalar_weights
        out: SparseVec = {}
        for h, bh in b.sparse().items():
            for f in G.source_fibers[G.tgt[h]]:
                af = a.coeffs[f]
                if af:
                    linalg.axpy(out, af * bh * w[h], {G.mul(f, h): ONE})
        return self.element(a.haar, out)

    def star(self, a: AlgebraElement) -> AlgebraElement:
        """a^*(g) = conj(a(g^-1))."""
        G = a.groupoid
        return AlgebraElement(haar=a.haar, coeffs=tuple(conj(a.coeffs[G.inv[g]]) for g in range(G.n_arrows)))

    def unit_element(self, haar: HaarSystem) -> AlgebraElement:
        """e = sum_x (1/u(x)) delta_{1_x} with u(x) = w(1_x)."""
        G = haar.groupoid
        return self.element(haar, {G.unit[x]: from_fraction(1 / haar.weights[G.unit[x]]) for x in range(G.n_objects)})

    def convolution_laws(self, a: AlgebraElement, b: AlgebraElement, c: AlgebraElement) -> List[Certificate]:
        """Associativity, (ab)* = b*a*, a** = a and the two-sided unit on one triple."""
        e = self.unit_element(a.haar)
        ab = self.convolve(a, b)
        checks = [
            ("associativity", self.convolve(ab, c).same_as(self.convolve(a, self.convolve(b, c)))),
            ("star_antihomomorphism", self.star(ab).same_as(self.convolve(self.star(b), self.star(a)))),
            ("star_involution", self.star(self.star(a)).same_as(a)),
            ("unit", self.convolve(e, a).same_as(a) and self.convolve(a, e).same_as(a)),
        ]
        witness = {"arrows": a.groupoid.n_arrows, "support": sorted(a.sparse())}
        return [passed(name) if ok else failed(name, witness) for name, ok in checks]

    def structure_constants(self, haar: HaarSystem) -> StructureConstants:
        """delta_g * delta_h = w(h) delta_{gh} when s(g) = t(h)."""
        w = haar.scalar_weights
        table = {(g, h): {gh: w[h]} for (g, h), gh in haar.groupoid.mul_table.items()}
        return StructureConstants(haar=haar, table=table)

    def as_algebra(self, haar: HaarSystem, name: str = "") -> Algebra:
        G = haar.groupoid
        return Algebra(
            name=name or f"A({G.name})",
            dim=G.n_arrows,
            products=self.structure_constants(haar).table,
            star_basis=tuple({G.inv[g]: ONE} for g in range(G.n_arrows)),
            basis_labels=tuple(G.arrow_label(g) for g in range(G.n_arrows)),
            haar=haar,
        )

    def algebra_unit(self, A: Algebra) -> Optional[SparseVec]:
        """Solve e * e_i = e_i = e_i * e for all i; None if A has no unit."""
        n = A.dim
        equations, rhs = [], []
        for i in range(n):
            for side in ("left", "right"):
                columns: Dict[int, SparseVec] = {}
                for j in range(n):
                    prod = A.product(j, i) if side == "left" else A.product(i, j)
                    for k, c in prod.items():
                        columns.setdefault(k, {})[j] = c
                for k in range(n):
                    equations.append(columns.get(k, {}))
                    rhs.append(ONE if k == i else ZERO)
        return linalg.solve(equations, rhs, n)

    # Generic algebras used as fixtures and targets

    def field_product(self, n: int) -> Algebra:
        """C^n with idempotent basis e_i e_i = e_i."""
        return Algebra(
            name=f"C^{n}", dim=n,
            products={(i, i): {i: ONE} for i in range(n)},
            star_basis=tuple({i: ONE} for i in range(n)),
        )

    def zero_algebra(self, dim: int) -> Algebra:
        """dim-dimensional algebra with zero multiplication."""
        return Algebra(name=f"zero({dim})", dim=dim, products={}, star_basis=tuple({i: ONE} for i in range(dim)))

    def tensor_algebra(self, A: Algebra, B: Algebra) -> Algebra:
        """A (x) B with e_i (x) f_j at index i * dim B + j."""
        m = B.dim
        products: Dict[tuple, SparseVec] = {}
        for (i, k), ak in A.products.items():
            for (j, l), bl in B.products.items():
                vec: SparseVec = {}
                for p, cp in ak.items():
                    for q, cq in bl.items():
                        linalg.axpy(vec, cp * cq, {p * m + q: ONE})
                if vec:
                    products[(i * m + j, k * m + l)] = vec
        return Algebra(name=f"{A.name}(x){B.name}", dim=A.dim * m, products=products)

    # Certificates

    def check_algebra_iso(self, f: LinearMap, A: Algebra, B: Algebra) -> Certificate:
        """f bijective and f(e_i e_j) = f(e_i) f(e_j) for all basis pairs."""
        if A.dim != B.dim:
            raise DimensionMismatch(f"dim A = {A.dim} but dim B = {B.dim}", [A.dim, B.dim])
        images = [f.get(i, {}) for i in range(A.dim)]
        r = linalg.rank(images)
        if r != A.dim:
            return failed("algebra_iso", {"reason": "not bijective"}, rank=r, dim=A.dim)
        for i in range(A.dim):
            for j in range(A.dim):
                lhs = apply_map(f, A.product(i, j))
                rhs = B.multiply(images[i], images[j])
                if not linalg.same(lhs, rhs):
                    logger.debug("multiplicativity fails on (%s, %s)", i, j)
                    return failed(
                        "algebra_iso",
                        {"pair": [A.basis_label(i), A.basis_label(j)], "indices": [i, j]},
                        rank=r, dim=A.dim,
                    )
        return passed("algebra_iso", rank=r, dim=A.dim)

    def tensor_algebra_iso(self, first: HaarSystem, second: HaarSystem) -> TensorIsoResult:
        """delta_g (x) delta_h -> delta_{(g, h)}, certified against A(G x H)."""
        G, H = first.groupoid, second.groupoid
        product = self.constructors.product_groupoid(G, H)
        haar = self.groupoids.product_haar(first, second, product)
        tensor = self.tensor_algebra(self.as_algebra(first), self.as_algebra(second))
        mapping = identity_map(tensor.dim)
        certificate = self.check_algebra_iso(mapping, tensor, self.as_algebra(haar))
        certificate.details["dim"] = tensor.dim
        return TensorIsoResult(product=product, product_haar=haar, mapping=mapping, certificate=certificate)

    def haar_change_iso(self, source: HaarSystem, target: HaarSystem) -> tuple:
        """delta_g -> (w(g)/w'(g)) delta_g from A_w(G) to A_w'(G), certified."""
        if source.groupoid.tables() != target.groupoid.tables():
            raise ParentMismatch("Haar systems live on different groupoids", None)
        mapping = {g: {g: from_fraction(source.weights[g] / target.weights[g])} for g in range(source.groupoid.n_arrows)}
        return mapping, self.check_algebra_iso(mapping, self.as_algebra(source), self.as_algebra(target))

    def z2_split_map(self) -> LinearMap:
        """C x C -> A(*//Z2): e_1 -> a_+, e_2 -> a_- with a_pm = (delta_1 pm delta_-1)/2."""
        half = gaussian("1/2")
        return {0: {0: half, 1: half}, 1: {0: half, 1: -half}}

    def find_separability_section(self, A: Algebra, side: str) -> SeparabilityResult:
        """Solve for sigma: A -> A (x) A with mu sigma = id and the requested linearity.

        Unknown x[i, j, k] is the coefficient of e_j (x) e_k in sigma(e_i). The
        system is complete, so an inconsistent system disproves existence.
        """
        if side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        n = A.dim
        nn = n * n

        def unknown(i: int, j: int, k: int) -> int:
            return i * nn + j * n + k

        equations: List[SparseVec] = []
        rhs: List = []
        # mu(sigma(e_i)) = e_i
        for i in range(n):
            rows: Dict[int, SparseVec] = {}
            for j in range(n):
                for k in range(n):
                    for l, c in A.product(j, k).items():
                        rows.setdefault(l, {})[unknown(i, j, k)] = c
            for l in range(n):
                equations.append(rows.get(l, {}))
                rhs.append(ONE if l == i else ZERO)
        if side in ("left", "bimodule"):
            # sigma(e_a e_i) - e_a . sigma(e_i) = 0
            for a in range(n):
                for i in range(n):
                    rows = {}
                    for l, c in A.product(a, i).items():
                        for j in range(n):
                            for k in range(n):
                                linalg.axpy(rows.setdefault(j * n + k, {}), c, {unknown(l, j, k): ONE})
                    for j in range(n):
                        for j2, c in A.product(a, j).items():
                            for k in range(n):
                                linalg.axpy(rows.setdefault(j2 * n + k, {}), -c, {unknown(i, j, k): ONE})
                    for key in sorted(rows):
                        equations.append(rows[key])
                        rhs.append(ZERO)
        if side in ("right", "bimodule"):
            # sigma(e_i e_b) - sigma(e_i) . e_b = 0
            for i in range(n):
                for b in range(n):
                    rows = {}
                    for l, c in A.product(i, b).items():
                        for j in range(n):
                            for k in range(n):
                                linalg.axpy(rows.setdefault(j * n + k, {}), c, {unknown(l, j, k): ONE})
                    for k in range(n):
                        for k2, c in A.product(k, b).items():
                            for j in range(n):
                                linalg.axpy(rows.setdefault(j * n + k2, {}), -c, {unknown(i, j, k): ONE})
                    for key in sorted(rows):
                        equations.append(rows[key])
                        rhs.append(ZERO)

        solution = linalg.solve(equations, rhs, n * nn)
        if solution is None:
            return SeparabilityResult(
                side=side, found=False,
                note="the linear system for a section is inconsistent; in finite dimension this disproves existence",
            )
        section = {i: {j * n + k: solution[unknown(i, j, k)] for j in range(n) for k in range(n) if unknown(i, j, k) in solution} for i in range(n)}
        if not self._is_section(A, section, side):
            raise ArithmeticError("solved section failed its exact re-check")
        return SeparabilityResult(side=side, found=True, section=section)

    def _is_section(self, A: Algebra, section: Dict[int, SparseVec], side: str) -> bool:
        n = A.dim
        def sigma(vec: SparseVec) -> SparseVec:
            return apply_map(section, vec)

        def mu(t: SparseVec) -> SparseVec:
            out: SparseVec = {}
            for idx, c in t.items():
                j, k = divmod(idx, n)
                linalg.axpy(out, c, A.product(j, k))
            return out

        for i in range(n):
            if not linalg.same(mu(section.get(i, {})), {i: ONE}):
                return False
        for a in range(n):
            for i in range(n):
                if side in ("left", "bimodule"):
                    lhs = sigma(A.product(a, i))
                    rhs = self._left_tensor_action(A, a, section.get(i, {}))
                    if not linalg.same(lhs, rhs):
                        return False
                if side in ("right", "bimodule"):
                    lhs = sigma(A.product(i, a))
                    rhs = self._right_tensor_action(A, section.get(i, {}), a)
                    if not linalg.same(lhs, rhs):
                        return False
        return True

    def _left_tensor_action(self, A: Algebra, a: int, t: SparseVec) -> SparseVec:
        n = A.dim
        out: SparseVec = {}
        for idx, c in t.items():
            j, k = divmod(idx, n)
            for j2, d in A.product(a, j).items():
                linalg.axpy(out, c * d, {j2 * n + k: ONE})
        return out

    def _right_tensor_action(self, A: Algebra, t: SparseVec, b: int) -> SparseVec:
        n = A.dim
        out: SparseVec = {}
        for idx, c in t.items():
            j, k = divmod(idx, n)
            for k2, d in A.product(k, b).items():
                linalg.axpy(out, c * d, {j * n + k2: ONE})
        return out

    def ideal_check(self, A: Algebra, vectors: Sequence[SparseVec]) -> Certificate:
        """Is span(vectors) a two-sided ideal? Left products are checked first."""
        span = EchelonBasis(vectors)
        note = "finite-dimensional subspaces are closed and modules over a unital algebra are smooth; no separate smoothness test"
        for side in ("left", "right"):
            for a in range(A.dim):
                for k, v in enumerate(vectors):
                    prod = A.multiply({a: ONE}, v) if side == "left" else A.multiply(v, {a: ONE})
                    if not span.contains(prod):
                        return failed(
                            "ideal",
                            {"multiplier": A.basis_label(a), "index": a, "side": side, "vector": k},
                            is_two_sided_ideal=False, is_proper=span.rank < A.dim, dim=span.rank, note=note,
                        )
        return passed("ideal", is_two_sided_ideal=True, is_proper=span.rank < A.dim, is_zero=span.rank == 0, dim=span.rank, note=note)

    def orbit_ideal(self, G: FiniteGroupoid, objects: Sequence[int]) -> List[SparseVec]:
        """Spanning vectors delta_g of A(G(U, U)) for a set of objects U."""
        keep = set(objects)
        return [{g: ONE} for g in range(G.n_arrows) if G.src[g] in keep and G.tgt[g] in keep]
