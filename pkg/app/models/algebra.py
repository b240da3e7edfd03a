from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel

from app.core import linalg
from app.core.linalg import SparseVec
from app.core.scalars import ZERO, conj
from app.models.groupoid import HaarSystem


class Algebra(BaseModel):
    """Finite-dimensional algebra given by sparse structure constants.

    ``products[(i, j)]`` is e_i * e_j; missing pairs multiply to zero.
    ``star_basis[i]`` is e_i^*, when the algebra carries an involution.
    """

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    name: str = ""
    dim: int
    products: Dict[Tuple[int, int], Dict[int, Any]]
    star_basis: Optional[Tuple[Dict[int, Any], ...]] = None
    basis_labels: Optional[Tuple[str, ...]] = None
    haar: Optional[HaarSystem] = None

    def product(self, i: int, j: int) -> SparseVec:
        return self.products.get((i, j), {})

    def multiply(self, a: SparseVec, b: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for i, ai in a.items():
            for j, bj in b.items():
                linalg.axpy(out, ai * bj, self.product(i, j))
        return out

    def star(self, a: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for i, ai in a.items():
            linalg.axpy(out, conj(ai), self.star_basis[i])
        return out

    def basis_label(self, i: int) -> str:
        return self.basis_labels[i] if self.basis_labels else str(i)

    def key(self) -> tuple:
        return (self.dim, tuple(sorted((k, tuple(sorted(v.items(), key=lambda kv: kv[0]))) for k, v in self.products.items())))


class AlgebraElement(BaseModel):
    """A function on arrows, i.e. a vector of A(G) for a given Haar system."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    haar: HaarSystem
    coeffs: Tuple[Any, ...]

    @property
    def groupoid(self):
        return self.haar.groupoid

    def sparse(self) -> SparseVec:
        return {g: c for g, c in enumerate(self.coeffs) if c}

    @classmethod
    def from_sparse(cls, haar: HaarSystem, vec: SparseVec) -> "AlgebraElement":
        return cls(haar=haar, coeffs=tuple(vec.get(g, ZERO) for g in range(haar.groupoid.n_arrows)))

    def same_as(self, other: "AlgebraElement") -> bool:
        return self.haar.key() == other.haar.key() and linalg.same(self.sparse(), other.sparse())


class StructureConstants(BaseModel):
    """c(g, h, k) with delta_g * delta_h = sum_k c(g, h, k) delta_k."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    haar: HaarSystem
    table: Dict[Tuple[int, int], Dict[int, Any]]

    def entries(self) -> List[Tuple[int, int, int, Any]]:
        return sorted((g, h, k, c) for (g, h), vec in self.table.items() for k, c in vec.items())

    def nonzero_count(self) -> int:
        return sum(len(vec) for vec in self.table.values())
