from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, field_validator

from app.core.scalars import from_fraction


class FiniteGroupoid(BaseModel):
    """Finite groupoid G1 => G0 with dense integer indices.

    ``compose`` lists every composable pair as ``(g, h, gh)``; ``gh`` means
    "h then g" and needs ``src[g] == tgt[h]``.
    """

    model_config = {"frozen": True}

    n_objects: int
    src: Tuple[int, ...]
    tgt: Tuple[int, ...]
    compose: Tuple[Tuple[int, int, int], ...]
    inv: Tuple[int, ...]
    unit: Tuple[int, ...]
    name: str = ""
    arrow_labels: Optional[Tuple[str, ...]] = None
    object_labels: Optional[Tuple[str, ...]] = None

    @field_validator("compose")
    @classmethod
    def sort_compose(cls, v):
        return tuple(sorted(v))

    @property
    def n_arrows(self) -> int:
        return len(self.src)

    @cached_property
    def mul_table(self) -> Dict[Tuple[int, int], int]:
        return {(g, h): gh for g, h, gh in self.compose}

    def mul(self, g: int, h: int) -> int:
        return self.mul_table[(g, h)]

    @cached_property
    def source_fibers(self) -> Tuple[Tuple[int, ...], ...]:
        fibers: List[List[int]] = [[] for _ in range(self.n_objects)]
        for g, s in enumerate(self.src):
            fibers[s].append(g)
        return tuple(tuple(f) for f in fibers)

    @cached_property
    def target_fibers(self) -> Tuple[Tuple[int, ...], ...]:
        fibers: List[List[int]] = [[] for _ in range(self.n_objects)]
        for g, t in enumerate(self.tgt):
            fibers[t].append(g)
        return tuple(tuple(f) for f in fibers)

    def hom_set(self, x: int, y: int) -> List[int]:
        """Arrows x -> y (source x, target y)."""
        return [g for g in self.source_fibers[x] if self.tgt[g] == y]

    def arrow_label(self, g: int) -> str:
        return self.arrow_labels[g] if self.arrow_labels else str(g)

    def object_label(self, x: int) -> str:
        return self.object_labels[x] if self.object_labels else str(x)

    def tables(self) -> tuple:
        """Structural identity, independent of labels and cached lookups."""
        return (self.n_objects, self.src, self.tgt, self.compose, self.inv, self.unit)


class HaarSystem(BaseModel):
    """Positive arrow weights w(h) = lambda_{s(h)}({h})."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    groupoid: FiniteGroupoid
    weights: Tuple[Fraction, ...]

    def weight(self, h: int) -> Fraction:
        return self.weights[h]

    @cached_property
    def scalar_weights(self) -> tuple:
        return tuple(from_fraction(w) for w in self.weights)

    def object_weights(self) -> Tuple[Fraction, ...]:
        """The normal form u(x) = w(1_x)."""
        return tuple(self.weights[e] for e in self.groupoid.unit)

    def key(self) -> tuple:
        return (self.groupoid.tables(), self.weights)


class GroupoidHom(BaseModel):
    """Functor between finite groupoids given on objects and arrows."""

    model_config = {"frozen": True}

    source: FiniteGroupoid
    target: FiniteGroupoid
    on_objects: Tuple[int, ...]
    on_arrows: Tuple[int, ...]
    name: str = ""
