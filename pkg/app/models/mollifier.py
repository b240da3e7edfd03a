from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field


class BumpProfile(BaseModel):
    """Radial bump exp(-1/(1 - |y|^2)) on the unit ball, scaled to unit integral."""

    model_config = {"frozen": True}

    dim: int = 1
    normalization: float
    first_moment: float

    def __call__(self, y: np.ndarray) -> np.ndarray:
        """Values at points y; for dim 2 the last axis holds coordinates."""
        r2 = np.asarray(y, dtype=float) ** 2 if self.dim == 1 else np.sum(np.asarray(y, dtype=float) ** 2, axis=-1)
        out = np.zeros_like(r2)
        inside = r2 < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - r2[inside])) / self.normalization
        return out

    def scaled(self, n: float, y: np.ndarray) -> np.ndarray:
        """eps_n(y) = n^d eps(n y)."""
        return n ** self.dim * self(n * np.asarray(y, dtype=float))


class SampledFunction(BaseModel):
    """A test function, sampled on uniform grids of spacing ``h`` when it is integrated.

    The function is held as a vectorized callable rather than a fixed array of
    samples: grid doubling and the per-scale grids h = r / n each need values on
    a different grid, so ``func`` is evaluated on every grid a pairing uses.
    ``h`` of None means the grid follows the configured resolution h = r / n.
    """

    model_config = {"arbitrary_types_allowed": True}

    name: str
    func: Callable[..., Any]
    dim: int = 1
    h: Optional[float] = None
    gradient_bound: Optional[float] = None

    def __call__(self, *args):
        return self.func(*args)


class ErrorTable(BaseModel):
    """Errors per scale n for one test function."""

    name: str
    n: List[int]
    errors: List[float]
    bounds: List[float] = Field(default_factory=list)
    ratios: List[float] = Field(default_factory=list)
    refined_errors: List[float] = Field(default_factory=list)


class ExperimentReport(BaseModel):
    experiment: str
    passed: bool
    tables: List[ErrorTable]
    details: Dict[str, Any] = Field(default_factory=dict)
    label: str = "pointwise-uniform numerical evidence only; operator-bornology convergence is not certified"
