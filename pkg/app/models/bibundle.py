from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, field_validator

from app.models.groupoid import FiniteGroupoid


class Bibundle(BaseModel):
    """Finite G-H bibundle  G0 <-l- P -r-> H0.

    ``left_action`` holds triples (g, p, g.p), ``right_action`` triples
    (p, h, p.h). Points are ``0..n_points-1``.
    """

    model_config = {"frozen": True}

    left: FiniteGroupoid
    right: FiniteGroupoid
    n_points: int
    l: Tuple[int, ...]
    r: Tuple[int, ...]
    left_action: Tuple[Tuple[int, int, int], ...]
    right_action: Tuple[Tuple[int, int, int], ...]
    name: str = ""
    point_labels: Optional[Tuple[str, ...]] = None

    @field_validator("left_action", "right_action")
    @classmethod
    def sort_actions(cls, v):
        return tuple(sorted(v))

    @cached_property
    def lact(self) -> Dict[Tuple[int, int], int]:
        return {(g, p): q for g, p, q in self.left_action}

    @cached_property
    def ract(self) -> Dict[Tuple[int, int], int]:
        return {(p, h): q for p, h, q in self.right_action}

    def act_left(self, g: int, p: int) -> int:
        return self.lact[(g, p)]

    def act_right(self, p: int, h: int) -> int:
        return self.ract[(p, h)]

    @cached_property
    def l_fibers(self) -> Tuple[Tuple[int, ...], ...]:
        fibers: List[List[int]] = [[] for _ in range(self.left.n_objects)]
        for p, x in enumerate(self.l):
            fibers[x].append(p)
        return tuple(tuple(f) for f in fibers)

    @cached_property
    def r_fibers(self) -> Tuple[Tuple[int, ...], ...]:
        fibers: List[List[int]] = [[] for _ in range(self.right.n_objects)]
        for p, y in enumerate(self.r):
            fibers[y].append(p)
        return tuple(tuple(f) for f in fibers)

    def point_label(self, p: int) -> str:
        return self.point_labels[p] if self.point_labels else str(p)

    def tables(self) -> tuple:
        return (self.left.tables(), self.right.tables(), self.n_points, self.l, self.r, self.left_action, self.right_action)


class LawWitness(BaseModel):
    """One principality condition and, when it fails, the offending data."""

    holds: bool
    witness: Optional[Any] = None


class PrincipalityCertificate(BaseModel):
    """Right principality split into its three conditions."""

    l_surjective: LawWitness
    char_map_injective: LawWitness
    char_map_surjective: LawWitness

    @property
    def passed(self) -> bool:
        return self.l_surjective.holds and self.char_map_injective.holds and self.char_map_surjective.holds

    def failures(self) -> List[str]:
        return [name for name in ("l_surjective", "char_map_injective", "char_map_surjective") if not getattr(self, name).holds]


class BiprincipalityCertificate(BaseModel):
    right: PrincipalityCertificate
    left: PrincipalityCertificate

    @property
    def passed(self) -> bool:
        return self.right.passed and self.left.passed


class Bijection(BaseModel):
    """A point bijection between two bibundles: ``mapping[p]`` is the image of p."""

    mapping: Tuple[int, ...]
