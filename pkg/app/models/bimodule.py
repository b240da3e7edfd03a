from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel

from app.core import linalg
from app.core.linalg import EchelonBasis, SparseVec
from app.models.algebra import Algebra
from app.models.bibundle import Bibundle
from app.models.groupoid import HaarSystem


class Bimodule(BaseModel):
    """A-B bimodule on a finite basis.

    ``left_action[(a, m)]`` is e_a . f_m and ``right_action[(m, b)]`` is
    f_m . e_b; missing keys act by zero.
    """

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    left: Algebra
    right: Algebra
    dim: int
    left_action: Dict[Tuple[int, int], Dict[int, Any]]
    right_action: Dict[Tuple[int, int], Dict[int, Any]]
    name: str = ""
    basis_labels: Optional[Tuple[str, ...]] = None

    def act_left(self, a: SparseVec, m: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for i, ai in a.items():
            for j, mj in m.items():
                linalg.axpy(out, ai * mj, self.left_action.get((i, j), {}))
        return out

    def act_right(self, m: SparseVec, b: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for j, mj in m.items():
            for i, bi in b.items():
                linalg.axpy(out, mj * bi, self.right_action.get((j, i), {}))
        return out


class ConvBimodule(Bimodule):
    """M(P): functions on the points of a bibundle with convolution actions."""

    bibundle: Bibundle
    left_haar: HaarSystem
    right_haar: HaarSystem


class QuotientSpace(BaseModel):
    """M (x) N modulo the balancing relations, in echelon-complement coordinates.

    Ambient index of m (x) n is ``m * right_dim + n``. The quotient basis is
    the list of ambient columns that are not relation pivots.
    """

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    left_dim: int
    right_dim: int
    relations: EchelonBasis
    free_columns: Tuple[int, ...]

    @property
    def ambient_dim(self) -> int:
        return self.left_dim * self.right_dim

    @property
    def dim(self) -> int:
        return len(self.free_columns)

    def index(self, m: int, n: int) -> int:
        return m * self.right_dim + n

    def split(self, column: int) -> Tuple[int, int]:
        return divmod(column, self.right_dim)

    def project(self, vec: SparseVec) -> SparseVec:
        """Quotient coordinates of an ambient vector."""
        position = {c: i for i, c in enumerate(self.free_columns)}
        return {position[c]: v for c, v in self.relations.reduce(vec).items()}

    def lift(self, i: int, one: Any) -> SparseVec:
        return {self.free_columns[i]: one}

    def relation_rows(self) -> List[SparseVec]:
        return [self.relations.rows[p] for p in self.relations.pivots]


class TensorProduct(BaseModel):
    """Quotient space together with the induced outer bimodule."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    quotient: QuotientSpace
    bimodule: Bimodule
