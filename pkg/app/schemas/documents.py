"""JSON document schemas. Every document carries ``"format": 1``."""
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from app.core.exceptions import SchemaError
from app.core.scalars import parse_scalar, rational

ScalarJson = Union[str, int, Dict[str, Union[str, int]]]
RationalJson = Union[str, int]

DocumentT = TypeVar("DocumentT", bound=BaseModel)


def _check_scalar(value):
    try:
        parse_scalar(value)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {value!r}")
    return value


def _check_rational(value):
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    try:
        rational(value)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {value!r}")
    return value


def json_path(loc) -> str:
    """("compose", 3, 1) -> "$.compose[3][1]"."""
    path = "$"
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def parse_document(model: Type[DocumentT], data: Any, path: str = "$") -> DocumentT:
    """Validate ``data`` against ``model``; the first pydantic error becomes a SchemaError."""
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        where = json_path(error["loc"])
        if path != "$":
            where = path + where[1:]
        raise SchemaError(error["msg"], where)


class Document(BaseModel):
    model_config = {"extra": "forbid"}

    format: Literal[1] = 1


class GroupoidDocument(Document):
    """Explicit tables, or a ``constructor`` shorthand such as {"kind": "pair", "n": 3}."""

    kind: Literal["groupoid"] = "groupoid"
    name: str = ""
    constructor: Optional[Dict[str, Any]] = None
    n_objects: Optional[int] = Field(default=None, ge=1)
    src: Optional[List[int]] = None
    tgt: Optional[List[int]] = None
    compose: Optional[List[Tuple[int, int, int]]] = None
    inv: Optional[List[int]] = None
    unit: Optional[List[int]] = None
    arrow_labels: Optional[List[str]] = None
    object_labels: Optional[List[str]] = None

    @model_validator(mode="after")
    def tables_or_constructor(self):
        tables = (self.n_objects, self.src, self.tgt, self.compose, self.inv, self.unit)
        if self.constructor is None and any(t is None for t in tables):
            raise ValueError("either a constructor or all of n_objects, src, tgt, compose, inv, unit")
        return self


class HaarDocument(Document):
    """Arrow weights, object weights ``u`` (normal form w(h) = u(t(h))), or counting measure."""

    kind: Literal["haar"] = "haar"
    groupoid: Optional[GroupoidDocument] = None
    weights: Optional[List[RationalJson]] = None
    u: Optional[List[RationalJson]] = None

    @field_validator("weights", "u")
    @classmethod
    def rationals(cls, v):
        return [_check_rational(w) for w in v] if v is not None else v


class BibundleDocument(Document):
    """Explicit anchors and sparse action tables, or a ``constructor`` shorthand."""

    kind: Literal["bibundle"] = "bibundle"
    name: str = ""
    constructor: Optional[Dict[str, Any]] = None
    left: Optional[GroupoidDocument] = None
    right: Optional[GroupoidDocument] = None
    n_points: Optional[int] = Field(default=None, ge=0)
    l: Optional[List[int]] = None
    r: Optional[List[int]] = None
    left_action: Optional[List[Tuple[int, int, int]]] = None
    right_action: Optional[List[Tuple[int, int, int]]] = None
    point_labels: Optional[List[str]] = None

    @model_validator(mode="after")
    def tables_or_constructor(self):
        tables = (self.left, self.right, self.n_points, self.l, self.r, self.left_action, self.right_action)
        if self.constructor is None and any(t is None for t in tables):
            raise ValueError("either a constructor or all of left, right, n_points, l, r, left_action, right_action")
        return self


class ElementDocument(Document):
    """Sparse coefficients keyed by basis index."""

    kind: Literal["element"] = "element"
    coefficients: Dict[int, ScalarJson]

    @field_validator("coefficients")
    @classmethod
    def scalars(cls, v):
        return {k: _check_scalar(c) for k, c in v.items()}


class LinearMapDocument(Document):
    """``columns[j]`` is the image of basis vector j."""

    kind: Literal["linear_map"] = "linear_map"
    columns: Dict[int, Dict[int, ScalarJson]]

    @field_validator("columns")
    @classmethod
    def scalars(cls, v):
        return {j: {i: _check_scalar(c) for i, c in col.items()} for j, col in v.items()}


class SubspaceDocument(Document):
    kind: Literal["subspace"] = "subspace"
    vectors: List[Dict[int, ScalarJson]]

    @field_validator("vectors")
    @classmethod
    def scalars(cls, v):
        return [{i: _check_scalar(c) for i, c in vec.items()} for vec in v]


class FieldProductDocument(Document):
    """The commutative algebra C^n with idempotent basis."""

    kind: Literal["field_product"] = "field_product"
    n: int = Field(ge=1)


class DiskDocument(Document):
    kind: Literal["disk"] = "disk"
    dim: int = Field(ge=1)
    generators: List[List[RationalJson]]

    @field_validator("generators")
    @classmethod
    def rationals(cls, v):
        return [[_check_rational(c) for c in g] for g in v]

    @model_validator(mode="after")
    def lengths(self):
        for g in self.generators:
            if len(g) != self.dim:
                raise ValueError(f"generators must have {self.dim} coordinates")
        return self


class SequenceDocument(Document):
    """Points v_1, v_2, ... and their claimed limit."""

    kind: Literal["sequence"] = "sequence"
    dim: int = Field(ge=1)
    points: List[List[RationalJson]]
    limit: List[RationalJson]

    @field_validator("points")
    @classmethod
    def rationals(cls, v):
        return [[_check_rational(c) for c in p] for p in v]

    @field_validator("limit")
    @classmethod
    def limit_rationals(cls, v):
        return [_check_rational(c) for c in v]

    @model_validator(mode="after")
    def lengths(self):
        for p in self.points + [self.limit]:
            if len(p) != self.dim:
                raise ValueError(f"points must have {self.dim} coordinates")
        return self


DOCUMENT_KINDS: Dict[str, Type[Document]] = {
    "groupoid": GroupoidDocument,
    "haar": HaarDocument,
    "bibundle": BibundleDocument,
    "element": ElementDocument,
    "linear_map": LinearMapDocument,
    "subspace": SubspaceDocument,
    "field_product": FieldProductDocument,
    "disk": DiskDocument,
    "sequence": SequenceDocument,
}
