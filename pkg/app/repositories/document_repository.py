import hashlib
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.core.exceptions import SchemaError
from app.core.linalg import LinearMap, SparseVec
from app.core.scalars import format_rational, format_scalar, parse_scalar
from app.models.algebra import Algebra
from app.models.bibundle import Bibundle
from app.models.bornology import PointSequence, PolytopalDisk
from app.models.groupoid import FiniteGroupoid, HaarSystem
from app.repositories.document_repository_interface import DocumentRepositoryInterface
from app.schemas.documents import (
    DOCUMENT_KINDS,
    BibundleDocument,
    DiskDocument,
    ElementDocument,
    FieldProductDocument,
    GroupoidDocument,
    HaarDocument,
    LinearMapDocument,
    SequenceDocument,
    SubspaceDocument,
    parse_document,
)
from app.services.algebra_service import AlgebraService
from app.services.bibundle_service import BibundleService

logger = logging.getLogger(__name__)


def digest(path: str) -> str:
    """sha256 of the file bytes, echoed into reports."""
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _vector(coefficients: Dict[int, Any]) -> SparseVec:
    vec = {int(i): parse_scalar(c) for i, c in coefficients.items()}
    return {i: c for i, c in vec.items() if c}


def _encode_vector(vec: SparseVec) -> Dict[str, dict]:
    return {str(i): format_scalar(vec[i]) for i in sorted(vec) if vec[i]}


class JsonDocumentRepository(DocumentRepositoryInterface):
    """JSON-file implementation of the document repository."""

    def __init__(self, algebras: Optional[AlgebraService] = None, bibundles: Optional[BibundleService] = None):
        self.algebras = algebras or AlgebraService()
        self.bibundles = bibundles or BibundleService(self.algebras.groupoids, self.algebras.constructors)
        self.groupoids = self.algebras.groupoids
        self.constructors = self.algebras.constructors

    # Files

    def read(self, path: str) -> Any:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(f"cannot read {path}: {exc.strerror}", "$")
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON at line {exc.lineno} column {exc.colno}", "$")

    def write(self, data: Any, path: str) -> None:
        Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        logger.debug("wrote %s", path)

    def kind_of(self, data: Any) -> str:
        kind = data.get("kind") if isinstance(data, dict) else None
        if kind not in DOCUMENT_KINDS:
            raise SchemaError(f"unknown document kind {kind!r}", "$.kind")
        return kind

    # Groupoids

    def decode_groupoid(self, data: Any, path: str = "$") -> FiniteGroupoid:
        doc = data if isinstance(data, GroupoidDocument) else parse_document(GroupoidDocument, data, path)
        if doc.constructor is not None:
            return self.constructors.from_shorthand(doc.constructor, f"{path}.constructor")
        G = FiniteGroupoid(
            n_objects=doc.n_objects,
            src=tuple(doc.src),
            tgt=tuple(doc.tgt),
            compose=tuple(tuple(t) for t in doc.compose),
            inv=tuple(doc.inv),
            unit=tuple(doc.unit),
            name=doc.name,
            arrow_labels=tuple(doc.arrow_labels) if doc.arrow_labels else None,
            object_labels=tuple(doc.object_labels) if doc.object_labels else None,
        )
        return self.groupoids.validate_groupoid(G)

    def encode_groupoid(self, G: FiniteGroupoid) -> dict:
        data = {
            "format": 1,
            "kind": "groupoid",
            "name": G.name,
            "n_objects": G.n_objects,
            "src": list(G.src),
            "tgt": list(G.tgt),
            "compose": [list(t) for t in sorted(G.compose)],
            "inv": list(G.inv),
            "unit": list(G.unit),
        }
        if G.arrow_labels:
            data["arrow_labels"] = list(G.arrow_labels)
        if G.object_labels:
            data["object_labels"] = list(G.object_labels)
        return data

    def load_groupoid(self, path: str) -> FiniteGroupoid:
        return self.decode_groupoid(self.read(path))

    def save_groupoid(self, G: FiniteGroupoid, path: str) -> None:
        self.write(self.encode_groupoid(G), path)

    # Haar systems

    def decode_haar(self, data: Any, groupoid: Optional[FiniteGroupoid] = None) -> HaarSystem:
        doc = parse_document(HaarDocument, data)
        if doc.groupoid is not None:
            groupoid = self.decode_groupoid(doc.groupoid, "$.groupoid")
        if groupoid is None:
            raise SchemaError("a Haar document without a groupoid needs one from the command line", "$.groupoid")
        if doc.weights is not None:
            return self.groupoids.validate_haar(groupoid, [Fraction(w) for w in doc.weights])
        if doc.u is not None:
            return self.groupoids.canonical_haar(groupoid, [Fraction(u) for u in doc.u])
        return self.groupoids.counting_haar(groupoid)

    def encode_haar(self, haar: HaarSystem) -> dict:
        return {
            "format": 1,
            "kind": "haar",
            "groupoid": self.encode_groupoid(haar.groupoid),
            "weights": [format_rational(w) for w in haar.weights],
        }

    def load_haar(self, path: str, groupoid: Optional[FiniteGroupoid] = None) -> HaarSystem:
        return self.decode_haar(self.read(path), groupoid)

    def save_haar(self, haar: HaarSystem, path: str) -> None:
        self.write(self.encode_haar(haar), path)

    # Bibundles

    def decode_bibundle(self, data: Any) -> Bibundle:
        doc = parse_document(BibundleDocument, data)
        if doc.constructor is not None:
            return self.bibundles.from_shorthand(doc.constructor, "$.constructor")
        P = Bibundle(
            left=self.decode_groupoid(doc.left, "$.left"),
            right=self.decode_groupoid(doc.right, "$.right"),
            n_points=doc.n_points,
            l=tuple(doc.l),
            r=tuple(doc.r),
            left_action=tuple(tuple(t) for t in doc.left_action),
            right_action=tuple(tuple(t) for t in doc.right_action),
            name=doc.name,
            point_labels=tuple(doc.point_labels) if doc.point_labels else None,
        )
        return self.bibundles.validate_bibundle(P)

    def encode_bibundle(self, P: Bibundle) -> dict:
        data = {
            "format": 1,
            "kind": "bibundle",
            "name": P.name,
            "left": self.encode_groupoid(P.left),
            "right": self.encode_groupoid(P.right),
            "n_points": P.n_points,
            "l": list(P.l),
            "r": list(P.r),
            "left_action": [list(t) for t in sorted(P.left_action)],
            "right_action": [list(t) for t in sorted(P.right_action)],
        }
        if P.point_labels:
            data["point_labels"] = list(P.point_labels)
        return data

    def load_bibundle(self, path: str) -> Bibundle:
        return self.decode_bibundle(self.read(path))

    def save_bibundle(self, P: Bibundle, path: str) -> None:
        self.write(self.encode_bibundle(P), path)

    # Vectors and maps

    def decode_element(self, data: Any) -> SparseVec:
        return _vector(parse_document(ElementDocument, data).coefficients)

    def encode_element(self, vec: SparseVec) -> dict:
        return {"format": 1, "kind": "element", "coefficients": _encode_vector(vec)}

    def load_element(self, path: str) -> SparseVec:
        return self.decode_element(self.read(path))

    def save_element(self, vec: SparseVec, path: str) -> None:
        self.write(self.encode_element(vec), path)

    def load_linear_map(self, path: str) -> LinearMap:
        doc = parse_document(LinearMapDocument, self.read(path))
        return {int(j): _vector(col) for j, col in doc.columns.items()}

    def load_subspace(self, path: str) -> List[SparseVec]:
        doc = parse_document(SubspaceDocument, self.read(path))
        return [_vector(vec) for vec in doc.vectors]

    # Bornology

    def decode_disk(self, data: Any) -> PolytopalDisk:
        doc = parse_document(DiskDocument, data)
        return PolytopalDisk(dim=doc.dim, generators=tuple(tuple(Fraction(c) for c in g) for g in doc.generators))

    def encode_disk(self, D: PolytopalDisk) -> dict:
        return {
            "format": 1,
            "kind": "disk",
            "dim": D.dim,
            "generators": [[format_rational(c) for c in g] for g in D.generators],
        }

    def load_disk(self, path: str) -> PolytopalDisk:
        return self.decode_disk(self.read(path))

    def save_disk(self, D: PolytopalDisk, path: str) -> None:
        self.write(self.encode_disk(D), path)

    def decode_sequence(self, data: Any) -> PointSequence:
        doc = parse_document(SequenceDocument, data)
        return PointSequence(
            dim=doc.dim,
            points=tuple(tuple(Fraction(c) for c in p) for p in doc.points),
            limit=tuple(Fraction(c) for c in doc.limit),
        )

    def encode_sequence(self, seq: PointSequence) -> dict:
        return {
            "format": 1,
            "kind": "sequence",
            "dim": seq.dim,
            "points": [[format_rational(c) for c in p] for p in seq.points],
            "limit": [format_rational(c) for c in seq.limit],
        }

    def load_sequence(self, path: str) -> PointSequence:
        return self.decode_sequence(self.read(path))

    def save_sequence(self, seq: PointSequence, path: str) -> None:
        self.write(self.encode_sequence(seq), path)

    # Algebras

    def load_algebra(self, path: str) -> Algebra:
        data = self.read(path)
        kind = self.kind_of(data)
        if kind == "groupoid":
            G = self.decode_groupoid(data)
            return self.algebras.as_algebra(self.groupoids.counting_haar(G), name=G.name)
        if kind == "haar":
            haar = self.decode_haar(data)
            return self.algebras.as_algebra(haar, name=haar.groupoid.name)
        if kind == "field_product":
            return self.algebras.field_product(parse_document(FieldProductDocument, data).n)
        raise SchemaError(f"a {kind} document does not describe an algebra", "$.kind")
