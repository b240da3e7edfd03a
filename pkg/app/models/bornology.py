from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, field_validator


class PolytopalDisk(BaseModel):
    """The disked hull of finitely many rational generators in Q^d."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    dim: int
    generators: Tuple[Tuple[Fraction, ...], ...]

    @field_validator("generators")
    @classmethod
    def coerce(cls, v):
        return tuple(tuple(Fraction(c) for c in g) for g in v)

    @property
    def size(self) -> int:
        return len(self.generators)


class GaugeResult(BaseModel):
    """Minkowski gauge value; ``value`` is None for +infinity."""

    model_config = {"arbitrary_types_allowed": True}

    value: Optional[Fraction]
    coefficients: List[Fraction] = []
    dual: List[Fraction] = []
    certified: bool = False

    @property
    def infinite(self) -> bool:
        return self.value is None

    def at_most(self, bound: Fraction) -> bool:
        return self.value is not None and self.value <= bound


class MackeyRate(BaseModel):
    model_config = {"arbitrary_types_allowed": True}

    gauges: List[Fraction]
    slope: Optional[float]
    convergent: bool


class PointSequence(BaseModel):
    """A sequence v_1, v_2, ... in Q^d with its claimed limit."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    dim: int
    points: Tuple[Tuple[Fraction, ...], ...]
    limit: Tuple[Fraction, ...]
