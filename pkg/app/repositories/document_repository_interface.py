from abc import ABC, abstractmethod
from typing import List, Optional

from app.core.linalg import LinearMap, SparseVec
from app.models.algebra import Algebra
from app.models.bibundle import Bibundle
from app.models.bornology import PointSequence, PolytopalDisk
from app.models.groupoid import FiniteGroupoid, HaarSystem


class DocumentRepositoryInterface(ABC):
    """Interface for versioned JSON documents."""

    @abstractmethod
    def load_groupoid(self, path: str) -> FiniteGroupoid:
        """Load and validate a groupoid."""
        pass

    @abstractmethod
    def save_groupoid(self, G: FiniteGroupoid, path: str) -> None:
        """Save a groupoid in canonical form."""
        pass

    @abstractmethod
    def load_haar(self, path: str, groupoid: Optional[FiniteGroupoid] = None) -> HaarSystem:
        """Load a Haar system; ``groupoid`` is used when the document has none."""
        pass

    @abstractmethod
    def save_haar(self, haar: HaarSystem, path: str) -> None:
        """Save a Haar system together with its groupoid."""
        pass

    @abstractmethod
    def load_bibundle(self, path: str) -> Bibundle:
        """Load and validate a bibundle."""
        pass

    @abstractmethod
    def save_bibundle(self, P: Bibundle, path: str) -> None:
        """Save a bibundle in canonical form."""
        pass

    @abstractmethod
    def load_element(self, path: str) -> SparseVec:
        """Load sparse coefficients."""
        pass

    @abstractmethod
    def save_element(self, vec: SparseVec, path: str) -> None:
        """Save sparse coefficients."""
        pass

    @abstractmethod
    def load_disk(self, path: str) -> PolytopalDisk:
        """Load a polytopal disk."""
        pass

    @abstractmethod
    def save_disk(self, D: PolytopalDisk, path: str) -> None:
        """Save a polytopal disk."""
        pass

    @abstractmethod
    def load_sequence(self, path: str) -> PointSequence:
        """Load a point sequence and its limit."""
        pass

    @abstractmethod
    def save_sequence(self, seq: PointSequence, path: str) -> None:
        """Save a point sequence and its limit."""
        pass

    @abstractmethod
    def load_linear_map(self, path: str) -> LinearMap:
        """Load a linear map given by columns."""
        pass

    @abstractmethod
    def load_subspace(self, path: str) -> List[SparseVec]:
        """Load spanning vectors of a subspace."""
        pass

    @abstractmethod
    def load_algebra(self, path: str) -> Algebra:
        """Load a groupoid, Haar or field-product document as an algebra."""
        pass
