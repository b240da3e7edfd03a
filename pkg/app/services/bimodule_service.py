import logging
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from app.core import linalg
from app.core.exceptions import (
    BimoduleAxiomError,
    HaarMismatch,
    MiddleMismatch,
    NoStar,
    NotEquivariant,
    NotPrincipal,
    ParentMismatch,
)
from app.core.linalg import EchelonBasis, SparseVec
from app.core.scalars import ONE, ZERO, conj
from app.models.algebra import Algebra
from app.models.bibundle import Bibundle
from app.models.bimodule import Bimodule, ConvBimodule, QuotientSpace, TensorProduct
from app.models.certificate import Certificate, failed, passed
from app.models.groupoid import HaarSystem
from app.services.algebra_service import AlgebraService, LinearMap, apply_map
from app.services.bibundle_service import BibundleService, Composition

logger = logging.getLogger(__name__)

EPI_COLLAPSE_NOTE = (
    "finite-dimensional modules: every surjective linear map splits, so plain, strong and split "
    "nondegeneracy (and strict versus ordinary epimorphisms) coincide"
)


class TauHat(BaseModel):
    """The functoriality constraint M(P) (x)_A(H) M(Q) -> M(P o Q)."""

    model_config = {"arbitrary_types_allowed": True}

    tensor: TensorProduct
    composition: Composition
    target: ConvBimodule
    ambient: Dict[int, Dict[int, object]]
    matrix: Dict[int, Dict[int, object]]
    certificate: Certificate


class ModuleSection(BaseModel):
    model_config = {"arbitrary_types_allowed": True}

    side: str
    found: bool
    section: Optional[Dict[int, Dict[int, object]]] = None
    note: str = ""


def _same_algebra(A: Algebra, B: Algebra) -> bool:
    return A.key() == B.key()


class BimoduleService:
    """Convolution bimodules, balanced tensor products and the functoriality constraint."""

    def __init__(self, algebras: Optional[AlgebraService] = None, bibundles: Optional[BibundleService] = None):
        self.algebras = algebras or AlgebraService()
        self.bibundles = bibundles or BibundleService(self.algebras.groupoids, self.algebras.constructors)

    # Construction

    def conv_bimodule(self, P: Bibundle, left_haar: HaarSystem, right_haar: HaarSystem) -> ConvBimodule:
        """delta_g . delta_q = w(g^-1) delta_{g.q};  delta_q . delta_h = w(h) delta_{q.h}."""
        if left_haar.groupoid.tables() != P.left.tables() or right_haar.groupoid.tables() != P.right.tables():
            raise HaarMismatch("Haar systems do not live on the bibundle's groupoids", None)
        wl, wr = left_haar.scalar_weights, right_haar.scalar_weights
        G = P.left
        M = ConvBimodule(
            left=self.algebras.as_algebra(left_haar),
            right=self.algebras.as_algebra(right_haar),
            dim=P.n_points,
            left_action={(g, q): {gq: wl[G.inv[g]]} for (g, q), gq in P.lact.items()},
            right_action={(q, h): {qh: wr[h]} for (q, h), qh in P.ract.items()},
            name=f"M({P.name})",
            basis_labels=tuple(P.point_label(p) for p in range(P.n_points)),
            bibundle=P,
            left_haar=left_haar,
            right_haar=right_haar,
        )
        self.check_bimodule_axioms(M)
        return M

    def regular_bimodule(self, A: Algebra) -> Bimodule:
        return Bimodule(left=A, right=A, dim=A.dim, left_action=dict(A.products), right_action=dict(A.products), name=f"{A.name} regular", basis_labels=A.basis_labels)

    def zero_action_module(self, A: Algebra, dim: int) -> Bimodule:
        """dim-dimensional A-A bimodule on which A acts by zero on both sides."""
        return Bimodule(left=A, right=A, dim=dim, left_action={}, right_action={}, name="zero action")

    def check_bimodule_axioms(self, M: Bimodule) -> Bimodule:
        """(ab).m = a.(b.m), m.(ab) = (m.a).b and (a.m).b = a.(m.b) on basis elements."""
        A, B = M.left, M.right
        for (a, b), ab in sorted(A.products.items()):
            for m in range(M.dim):
                lhs = M.act_left(ab, {m: ONE})
                rhs = M.act_left({a: ONE}, M.act_left({b: ONE}, {m: ONE}))
                if not linalg.same(lhs, rhs):
                    raise BimoduleAxiomError("left action is not associative", [a, b, m])
        for (a, b), ab in sorted(B.products.items()):
            for m in range(M.dim):
                lhs = M.act_right({m: ONE}, ab)
                rhs = M.act_right(M.act_right({m: ONE}, {a: ONE}), {b: ONE})
                if not linalg.same(lhs, rhs):
                    raise BimoduleAxiomError("right action is not associative", [m, a, b])
        for a in range(A.dim):
            for m in range(M.dim):
                am = M.act_left({a: ONE}, {m: ONE})
                for b in range(B.dim):
                    if not linalg.same(M.act_right(am, {b: ONE}), M.act_left({a: ONE}, M.act_right({m: ONE}, {b: ONE}))):
                        raise BimoduleAxiomError("actions do not commute", [a, m, b])
        return M

    # Tensor products

    def tensor_over(self, M: Bimodule, N: Bimodule) -> TensorProduct:
        """M (x)_B N as the quotient of M (x) N by (m.b) (x) n - m (x) (b.n)."""
        if not _same_algebra(M.right, N.left):
            raise MiddleMismatch("right algebra of M differs from left algebra of N", [M.right.name, N.left.name])
        B = M.right
        d = N.dim
        rows: List[SparseVec] = []
        for i in range(M.dim):
            for b in range(B.dim):
                mb = M.act_right({i: ONE}, {b: ONE})
                for j in range(N.dim):
                    rel: SparseVec = {}
                    for k, c in mb.items():
                        linalg.axpy(rel, c, {k * d + j: ONE})
                    for k, c in N.act_left({b: ONE}, {j: ONE}).items():
                        linalg.axpy(rel, -c, {i * d + k: ONE})
                    if rel:
                        rows.append(rel)
        relations = EchelonBasis(rows, n_cols=M.dim * d)
        quotient = QuotientSpace(
            left_dim=M.dim, right_dim=d, relations=relations,
            free_columns=tuple(relations.free_columns(M.dim * d)),
        )

        def left_ambient(a: int, vec: SparseVec) -> SparseVec:
            out: SparseVec = {}
            for col, c in vec.items():
                i, j = quotient.split(col)
                for k, v in M.act_left({a: ONE}, {i: ONE}).items():
                    linalg.axpy(out, c * v, {k * d + j: ONE})
            return out

        def right_ambient(vec: SparseVec, e: int) -> SparseVec:
            out: SparseVec = {}
            for col, c in vec.items():
                i, j = quotient.split(col)
                for k, v in N.act_right({j: ONE}, {e: ONE}).items():
                    linalg.axpy(out, c * v, {i * d + k: ONE})
            return out

        for row in quotient.relation_rows():
            for a in range(M.left.dim):
                if quotient.project(left_ambient(a, row)):
                    raise BimoduleAxiomError("left action does not descend to the tensor product", a)
            for e in range(N.right.dim):
                if quotient.project(right_ambient(row, e)):
                    raise BimoduleAxiomError("right action does not descend to the tensor product", e)

        left_action, right_action = {}, {}
        for x in range(quotient.dim):
            lifted = quotient.lift(x, ONE)
            for a in range(M.left.dim):
                image = quotient.project(left_ambient(a, lifted))
                if image:
                    left_action[(a, x)] = image
            for e in range(N.right.dim):
                image = quotient.project(right_ambient(lifted, e))
                if image:
                    right_action[(x, e)] = image
        labels = None
        if M.basis_labels and N.basis_labels:
            labels = tuple(
                f"{M.basis_labels[i]}(x){N.basis_labels[j]}" for i, j in (quotient.split(c) for c in quotient.free_columns)
            )
        bimodule = Bimodule(
            left=M.left, right=N.right, dim=quotient.dim,
            left_action=left_action, right_action=right_action,
            name=f"{M.name}(x){N.name}", basis_labels=labels,
        )
        return TensorProduct(quotient=quotient, bimodule=bimodule)

    def check_bimodule_iso(self, f: LinearMap, M: Bimodule, N: Bimodule, name: str = "bimodule_iso") -> Certificate:
        """f: M -> N bijective and bilinear, checked on basis elements."""
        if not (_same_algebra(M.left, N.left) and _same_algebra(M.right, N.right)):
            raise ParentMismatch("bimodules are over different algebras", None)
        if M.dim != N.dim:
            return failed(name, {"reason": "dimensions differ", "dims": [M.dim, N.dim]})
        images = [f.get(i, {}) for i in range(M.dim)]
        r = linalg.rank(images)
        if r != M.dim:
            return failed(name, {"reason": "not bijective"}, rank=r, dim=M.dim)
        for i in range(M.dim):
            for a in range(M.left.dim):
                if not linalg.same(apply_map(f, M.act_left({a: ONE}, {i: ONE})), N.act_left({a: ONE}, images[i])):
                    return failed(name, {"reason": "not left linear", "algebra": a, "basis": i}, rank=r, dim=M.dim)
            for b in range(M.right.dim):
                if not linalg.same(apply_map(f, M.act_right({i: ONE}, {b: ONE})), N.act_right(images[i], {b: ONE})):
                    return failed(name, {"reason": "not right linear", "algebra": b, "basis": i}, rank=r, dim=M.dim)
        return passed(name, rank=r, dim=M.dim)

    def tensor_associator_check(self, M: Bimodule, N: Bimodule, R: Bimodule) -> Certificate:
        """(m (x) n) (x) r -> m (x) (n (x) r) is well defined and bijective."""
        MN = self.tensor_over(M, N)
        left = self.tensor_over(MN.bimodule, R)
        NR = self.tensor_over(N, R)
        right = self.tensor_over(M, NR.bimodule)
        dR, dNR = R.dim, NR.bimodule.dim

        def image(col: int) -> SparseVec:
            x, r = divmod(col, dR)
            m, n = MN.quotient.split(MN.quotient.free_columns[x])
            out: SparseVec = {}
            for y, c in NR.quotient.project({n * dR + r: ONE}).items():
                linalg.axpy(out, c, {m * dNR + y: ONE})
            return right.quotient.project(out)

        for row in left.quotient.relation_rows():
            total: SparseVec = {}
            for col, c in row.items():
                linalg.axpy(total, c, image(col))
            if total:
                return failed("tensor_associator", {"reason": "not well defined"})
        images = [image(left.quotient.free_columns[x]) for x in range(left.quotient.dim)]
        r = linalg.rank(images)
        details = {"dim_left": left.quotient.dim, "dim_right": right.quotient.dim, "rank": r}
        if not (r == left.quotient.dim == right.quotient.dim):
            return failed("tensor_associator", {"reason": "not bijective"}, **details)
        return passed("tensor_associator", **details)

    # Functoriality constraint

    def tau_hat(self, MP: ConvBimodule, MQ: ConvBimodule) -> TauHat:
        """tau(f (x) g)[p0, q0] = sum over s(h) = r(p0) of f(p0.h^-1) g(h.q0) w(h)."""
        P, Q = MP.bibundle, MQ.bibundle
        if MP.right_haar.key() != MQ.left_haar.key():
            raise HaarMismatch("the middle Haar systems differ", None)
        for name, bibundle in (("P", P), ("Q", Q)):
            certificate = self.bibundles.is_right_principal(bibundle)
            if not certificate.passed:
                raise NotPrincipal(f"{name} is not right principal", certificate.failures())
        composition = self.bibundles.composition(P, Q)
        target = self.conv_bimodule(composition.bibundle, MP.left_haar, MQ.right_haar)
        tensor = self.tensor_over(MP, MQ)
        quotient = tensor.quotient
        H = P.right
        w = MP.right_haar.scalar_weights
        d = Q.n_points

        ambient: Dict[int, SparseVec] = {}
        representative: Dict[int, Tuple[int, int]] = {}
        for pq, point in composition.orbit_of.items():
            if point not in representative or pq < representative[point]:
                representative[point] = pq
        for point, (p0, q0) in sorted(representative.items()):
            for h in H.source_fibers[P.r[p0]]:
                col = P.ract[(p0, H.inv[h])] * d + Q.lact[(h, q0)]
                linalg.axpy(ambient.setdefault(col, {}), w[h], {point: ONE})
        ambient = {col: vec for col, vec in ambient.items() if vec}

        def apply(vec: SparseVec) -> SparseVec:
            out: SparseVec = {}
            for col, c in vec.items():
                linalg.axpy(out, c, ambient.get(col, {}))
            return out

        for row in quotient.relation_rows():
            if apply(row):
                certificate = failed("tau_hat", {"reason": "does not vanish on balancing relations"})
                return TauHat(tensor=tensor, composition=composition, target=target, ambient=ambient, matrix={}, certificate=certificate)
        matrix = {x: apply(quotient.lift(x, ONE)) for x in range(quotient.dim)}
        r = linalg.rank(matrix.values())
        details = {"tensor_dim": quotient.dim, "target_dim": target.dim, "rank": r, "ambient_dim": quotient.ambient_dim}
        if not (r == quotient.dim == target.dim):
            certificate = failed("tau_hat", {"reason": "not bijective"}, **details)
        else:
            iso = self.check_bimodule_iso(matrix, tensor.bimodule, target, name="tau_hat")
            iso.details.update(details)
            certificate = iso
        return TauHat(tensor=tensor, composition=composition, target=target, ambient=ambient, matrix=matrix, certificate=certificate)

    def associator(self, PQ: Composition, QR: Composition, PQ_R: Composition, P_QR: Composition) -> List[int]:
        """[[p, q], r] -> [p, [q, r]] as a point map (P o Q) o R -> P o (Q o R)."""
        pq_rep: Dict[int, Tuple[int, int]] = {}
        for pq, point in PQ.orbit_of.items():
            pq_rep.setdefault(point, pq)
        mapping: Dict[int, int] = {}
        for (x, r), point in PQ_R.orbit_of.items():
            p, q = pq_rep[x]
            # any member of the orbit x gives the same class
            image = P_QR.orbit_of[(p, QR.orbit_of[(q, r)])]
            if mapping.setdefault(point, image) != image:
                raise NotEquivariant("associator is not well defined", [x, r])
        return [mapping[pt] for pt in range(PQ_R.bibundle.n_points)]

    def tau_coherence_check(self, MP: ConvBimodule, MQ: ConvBimodule, MR: ConvBimodule) -> Certificate:
        """alpha_* tau_{PoQ,R} (tau_{P,Q} (x) id) = tau_{P,QoR} (id (x) tau_{Q,R}) on basis triples."""
        tau_pq = self.tau_hat(MP, MQ)
        tau_qr = self.tau_hat(MQ, MR)
        tau_pq_r = self.tau_hat(tau_pq.target, MR)
        tau_p_qr = self.tau_hat(MP, tau_qr.target)
        alpha = self.associator(tau_pq.composition, tau_qr.composition, tau_pq_r.composition, tau_p_qr.composition)
        bad = self.bibundles.is_biequivariant(tau_pq_r.composition.bibundle, tau_p_qr.composition.bibundle, alpha)
        if bad is not None:
            return failed("tau_coherence", {"reason": "associator is not biequivariant", **bad})
        P, Q, R = MP.bibundle, MQ.bibundle, MR.bibundle
        dQ, dR = Q.n_points, R.n_points
        dQR = tau_qr.target.dim
        checked = 0
        for p in range(P.n_points):
            for q in Q.l_fibers[P.r[p]]:
                for r in R.l_fibers[Q.r[q]]:
                    path1: SparseVec = {}
                    for x, c in tau_pq.ambient.get(p * dQ + q, {}).items():
                        for z, c2 in tau_pq_r.ambient.get(x * dR + r, {}).items():
                            linalg.axpy(path1, c * c2, {alpha[z]: ONE})
                    path2: SparseVec = {}
                    for y, c in tau_qr.ambient.get(q * dR + r, {}).items():
                        linalg.axpy(path2, c, tau_p_qr.ambient.get(p * dQR + y, {}))
                    if not linalg.same(path1, path2):
                        return failed("tau_coherence", {"triple": [p, q, r]}, checked=checked)
                    checked += 1
        return passed("tau_coherence", checked=checked, associator=alpha)

    def tau_naturality_check(self, MP: ConvBimodule, MP2: ConvBimodule, MQ: ConvBimodule, MQ2: ConvBimodule, phi: Sequence[int], psi: Sequence[int]) -> Certificate:
        """tau_{P',Q'} (phi_* (x) psi_*) = (phi o psi)_* tau_{P,Q} for isos phi: P -> P', psi: Q -> Q'.

        phi_* here is the module map delta_p -> delta_{phi(p)}.
        """
        for source, target, mapping in ((MP.bibundle, MP2.bibundle, phi), (MQ.bibundle, MQ2.bibundle, psi)):
            bad = self.bibundles.is_biequivariant(source, target, mapping)
            if bad is not None:
                raise NotEquivariant("2-morphism is not biequivariant", bad)
        tau = self.tau_hat(MP, MQ)
        tau2 = self.tau_hat(MP2, MQ2)
        comp, comp2 = tau.composition, tau2.composition
        induced: Dict[int, int] = {}
        for (p, q), point in comp.orbit_of.items():
            image = comp2.orbit_of[(phi[p], psi[q])]
            if induced.setdefault(point, image) != image:
                return failed("tau_naturality", {"reason": "induced map on composites is not well defined"})
        d, d2 = MQ.dim, MQ2.dim
        for p in range(MP.dim):
            for q in MQ.bibundle.l_fibers[MP.bibundle.r[p]]:
                lhs = tau2.ambient.get(phi[p] * d2 + psi[q], {})
                rhs: SparseVec = {}
                for z, c in tau.ambient.get(p * d + q, {}).items():
                    linalg.axpy(rhs, c, {induced[z]: ONE})
                if not linalg.same(lhs, rhs):
                    return failed("tau_naturality", {"pair": [p, q]})
        return passed("tau_naturality")

    # Smoothness, sections, nondegeneracy

    def smoothness_check(self, M: Bimodule, side: str = "left") -> Certificate:
        """A (x)_A M -> M (or M (x)_B B -> M) descends and is bijective."""
        if side == "left":
            tensor = self.tensor_over(self.regular_bimodule(M.left), M)
            dM = M.dim

            def action(col: int) -> SparseVec:
                a, m = divmod(col, dM)
                return M.act_left({a: ONE}, {m: ONE})
        else:
            tensor = self.tensor_over(M, self.regular_bimodule(M.right))
            dB = M.right.dim

            def action(col: int) -> SparseVec:
                m, b = divmod(col, dB)
                return M.act_right({m: ONE}, {b: ONE})

        quotient = tensor.quotient
        name = f"smooth_{side}"
        for row in quotient.relation_rows():
            total: SparseVec = {}
            for col, c in row.items():
                linalg.axpy(total, c, action(col))
            if total:
                return failed(name, {"reason": "action does not descend"})
        images = [action(col) for col in quotient.free_columns]
        r = linalg.rank(images)
        details = {"tensor_dim": quotient.dim, "module_dim": M.dim, "rank": r}
        if r == quotient.dim == M.dim:
            return passed(name, **details)
        return failed(name, {"reason": "multiplication map is not bijective"}, **details)

    def self_induced_check(self, A: Algebra) -> Certificate:
        certificate = self.smoothness_check(self.regular_bimodule(A), "left")
        certificate.name = "self_induced"
        return certificate

    def find_module_section(self, M: Bimodule, side: str = "right") -> ModuleSection:
        """A-linear sigma with action . sigma = id.

        right: sigma: M -> M (x) A, unknown x[i, j, k] = coeff of f_j (x) e_k in sigma(f_i).
        left:  sigma: M -> A (x) M, unknown x[i, k, j] = coeff of e_k (x) f_j in sigma(f_i).
        """
        A = M.right if side == "right" else M.left
        d, n = M.dim, A.dim
        block = d * n

        def unknown(i: int, col: int) -> int:
            return i * block + col

        def act(col: int) -> SparseVec:
            if side == "right":
                j, k = divmod(col, n)
                return M.act_right({j: ONE}, {k: ONE})
            k, j = divmod(col, d)
            return M.act_left({k: ONE}, {j: ONE})

        def algebra_on(col: int, b: int) -> SparseVec:
            """(f_j (x) e_k) . e_b  or  e_b . (e_k (x) f_j)."""
            out: SparseVec = {}
            if side == "right":
                j, k = divmod(col, n)
                for k2, c in A.product(k, b).items():
                    linalg.axpy(out, c, {j * n + k2: ONE})
            else:
                k, j = divmod(col, d)
                for k2, c in A.product(b, k).items():
                    linalg.axpy(out, c, {k2 * d + j: ONE})
            return out

        def module_on(i: int, b: int) -> SparseVec:
            return M.act_right({i: ONE}, {b: ONE}) if side == "right" else M.act_left({b: ONE}, {i: ONE})

        equations: List[SparseVec] = []
        rhs: List = []
        for i in range(d):
            rows: Dict[int, SparseVec] = {}
            for col in range(block):
                for k, c in act(col).items():
                    rows.setdefault(k, {})[unknown(i, col)] = c
            for k in range(d):
                equations.append(rows.get(k, {}))
                rhs.append(ONE if k == i else ZERO)
        for i in range(d):
            for b in range(n):
                rows = {}
                for l, c in module_on(i, b).items():
                    for col in range(block):
                        linalg.axpy(rows.setdefault(col, {}), c, {unknown(l, col): ONE})
                for col in range(block):
                    for col2, c in algebra_on(col, b).items():
                        linalg.axpy(rows.setdefault(col2, {}), -c, {unknown(i, col): ONE})
                for key in sorted(rows):
                    if rows[key]:
                        equations.append(rows[key])
                        rhs.append(ZERO)
        solution = linalg.solve(equations, rhs, d * block)
        if solution is None:
            return ModuleSection(side=side, found=False, note="the linear system for a section is inconsistent; in finite dimension this disproves existence")
        section = {i: {col: solution[unknown(i, col)] for col in range(block) if unknown(i, col) in solution} for i in range(d)}
        for i in range(d):
            total: SparseVec = {}
            for col, c in section[i].items():
                linalg.axpy(total, c, act(col))
            if not linalg.same(total, {i: ONE}):
                raise ArithmeticError("module section failed its exact re-check")
        return ModuleSection(side=side, found=True, section=section)

    def nondegeneracy_class(self, M: Bimodule, side: str = "left") -> Certificate:
        A = M.left if side == "left" else M.right
        images = []
        for a in range(A.dim):
            for m in range(M.dim):
                images.append(M.act_left({a: ONE}, {m: ONE}) if side == "left" else M.act_right({m: ONE}, {a: ONE}))
        r = linalg.rank(images)
        surjective = r == M.dim
        details = {"surjective": surjective, "split": surjective, "strong": surjective, "rank": r, "module_dim": M.dim, "note": EPI_COLLAPSE_NOTE}
        name = f"nondegenerate_{side}"
        return passed(name, **details) if surjective else failed(name, {"rank": r, "module_dim": M.dim}, **details)

    def projectivity_report(self, M: Bimodule, side: str = "right") -> Certificate:
        """Separable algebra plus an A-linear section of the action."""
        A = M.right if side == "right" else M.left
        separable = self.algebras.find_separability_section(A, side).found
        section = self.find_module_section(M, side)
        details = {"algebra_separable": separable, "module_section": section.found, "note": EPI_COLLAPSE_NOTE}
        name = f"projective_{side}"
        if separable and section.found:
            return passed(name, **details)
        return failed(name, {"algebra_separable": separable, "module_section": section.found}, **details)

    # 2-morphisms and duals

    def pushforward(self, MP: ConvBimodule, MP2: ConvBimodule, phi: Sequence[int]) -> Tuple[LinearMap, Certificate]:
        """For phi: P -> P', the map M(P') -> M(P), f -> f o phi, certified bilinear."""
        bad = self.bibundles.is_biequivariant(MP.bibundle, MP2.bibundle, phi)
        if bad is not None:
            raise NotEquivariant("map is not a biequivariant bijection", bad)
        inverse = {q: p for p, q in enumerate(phi)}
        mapping = {q: {inverse[q]: ONE} for q in range(MP2.dim)}
        return mapping, self.check_bimodule_iso(mapping, MP2, MP, name="pushforward")

    def dagger_bimodule(self, M: Bimodule) -> Bimodule:
        """B-A bimodule on the conjugate space: b . m = conj(m . b^*), m . a = conj(a^* . m)."""
        if M.left.star_basis is None or M.right.star_basis is None:
            raise NoStar("both algebras need a star structure", None)

        def conj_vec(vec: SparseVec) -> SparseVec:
            return {k: conj(v) for k, v in vec.items()}

        left_action, right_action = {}, {}
        for b in range(M.right.dim):
            for i in range(M.dim):
                image = conj_vec(M.act_right({i: ONE}, M.right.star_basis[b]))
                if image:
                    left_action[(b, i)] = image
        for a in range(M.left.dim):
            for i in range(M.dim):
                image = conj_vec(M.act_left(M.left.star_basis[a], {i: ONE}))
                if image:
                    right_action[(i, a)] = image
        dagger = Bimodule(
            left=M.right, right=M.left, dim=M.dim,
            left_action=left_action, right_action=right_action,
            name=f"{M.name}^dagger", basis_labels=M.basis_labels,
        )
        return self.check_bimodule_axioms(dagger)

    # Morita

    def morita_check(self, P: Bibundle, left_haar: HaarSystem, right_haar: HaarSystem) -> List[Certificate]:
        """Biprincipality, then M(P) (x) M(P^dagger) = A(G) and M(P^dagger) (x) M(P) = A(H)."""
        principal = self.bibundles.is_biprincipal(P)
        certificates = [
            Certificate(
                name="biprincipal", passed=principal.passed,
                witness=None if principal.passed else {"right": principal.right.failures(), "left": principal.left.failures(), "certificate": principal.model_dump()},
            )
        ]
        if not principal.passed:
            return certificates
        opposite = self.bibundles.opposite_bibundle(P)
        MP = self.conv_bimodule(P, left_haar, right_haar)
        MPd = self.conv_bimodule(opposite, right_haar, left_haar)
        for name, first, second, haar in (
            ("morita_left", MP, MPd, left_haar),
            ("morita_right", MPd, MP, right_haar),
        ):
            tau = self.tau_hat(first, second)
            certificates.append(tau.certificate.model_copy(update={"name": f"{name}_tau_hat"}))
            if not tau.certificate.passed:
                continue
            G = haar.groupoid
            identity = self.bibundles.identity_bibundle(G)
            iso = self.bibundles.find_biequivariant_iso(identity, tau.composition.bibundle)
            if iso is None:
                certificates.append(Certificate(name=name, passed=False, witness={"reason": "composite is not isomorphic to the identity bibundle"}))
                continue
            M_id = self.conv_bimodule(identity, haar, haar)
            pullback, _ = self.pushforward(M_id, tau.target, iso.mapping)
            composite = {x: apply_map(pullback, vec) for x, vec in tau.matrix.items()}
            certificate = self.check_bimodule_iso(composite, tau.tensor.bimodule, self.regular_bimodule(M_id.left), name=name)
            certificate.details["tensor_dim"] = tau.tensor.bimodule.dim
            certificates.append(certificate)
        return certificates

    def dagger_matches_opposite(self, P: Bibundle, left_haar: HaarSystem, right_haar: HaarSystem) -> Certificate:
        """M(P)^dagger and M(P^dagger) agree under the identity map on points."""
        dagger = self.dagger_bimodule(self.conv_bimodule(P, left_haar, right_haar))
        opposite = self.conv_bimodule(self.bibundles.opposite_bibundle(P), right_haar, left_haar)
        identity = {i: {i: ONE} for i in range(dagger.dim)}
        return self.check_bimodule_iso(identity, dagger, opposite, name="dagger_opposite")

