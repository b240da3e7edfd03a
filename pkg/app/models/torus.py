from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

Mode = Tuple[int, int]


class TorusElement(BaseModel):
    """Finite sum of monomials u^k v^m with complex float coefficients.

    ``rational`` is set when theta = p/q is known exactly, so that integrality
    of k*theta is decided without rounding.
    """

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    theta: float
    coeffs: Dict[Mode, Any]
    rational: Optional[Fraction] = None

    def support(self) -> List[Mode]:
        return sorted(mode for mode, c in self.coeffs.items() if c != 0)

    def coefficient(self, k: int, m: int) -> complex:
        return complex(self.coeffs.get((k, m), 0.0))

    def is_zero(self) -> bool:
        return not self.support()

    def distance(self, other: "TorusElement") -> float:
        modes = set(self.coeffs) | set(other.coeffs)
        return max((abs(self.coefficient(*mode) - other.coefficient(*mode)) for mode in modes), default=0.0)


class AveragingReport(BaseModel):
    """Suppression factors and residuals of c_n = Phi_1,n(Phi_2,n(a* a)) along n."""

    theta: float
    nu: float
    n: List[int]
    residuals: List[float]
    factors: Dict[str, List[float]] = Field(default_factory=dict)
    literal_deviation: float = 0.0
    resonant_modes: List[Mode] = Field(default_factory=list)
    passed: bool = False
    note: str = ""
