import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from sympy.polys.domains import QQ, QQ_I

from app.core.config import settings
from app.core.scalars import format_float, format_rational, format_scalar
from app.models.certificate import Certificate


def to_jsonable(value: Any) -> Any:
    """Exact values as rational strings, Gaussian rationals as {"re", "im"}, floats to 17 digits."""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump())
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction) or QQ.of_type(value):
        return format_rational(value)
    if QQ_I.of_type(value):
        return format_scalar(value)
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, complex):
        return {"re": format_float(value.real), "im": format_float(value.imag)}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(v) for v in items]
    return str(value)


class CertificateOutcome(BaseModel):
    """Schema for one certificate in a report."""
    name: str
    passed: bool
    witness: Any = None
    details: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_certificate(cls, certificate: Certificate) -> "CertificateOutcome":
        return cls(
            name=certificate.name,
            passed=certificate.passed,
            witness=to_jsonable(certificate.witness),
            details=to_jsonable(certificate.details),
        )


class Report(BaseModel):
    """Schema for the machine-readable report of one command."""
    format: int = settings.FORMAT_VERSION
    app: str = settings.APP_NAME
    version: str = settings.APP_VERSION
    command: List[str]
    inputs: Dict[str, str] = Field(default_factory=dict)
    seed: Optional[int] = None
    passed: bool
    certificates: List[CertificateOutcome] = Field(default_factory=list)
    values: Dict[str, Any] = Field(default_factory=dict)
    timings: Optional[Dict[str, float]] = None

    def render(self) -> str:
        data = self.model_dump(exclude_none=False)
        if self.timings is None:
            data.pop("timings")
        return json.dumps(data, sort_keys=True, indent=2) + "\n"


def build_report(
    command: Sequence[str],
    certificates: Sequence[Certificate] = (),
    values: Optional[Dict[str, Any]] = None,
    inputs: Optional[Dict[str, str]] = None,
    seed: Optional[int] = None,
    timings: Optional[Dict[str, float]] = None,
) -> Report:
    """Passed iff every certificate in scope passed."""
    outcomes = [CertificateOutcome.from_certificate(c) for c in certificates]
    return Report(
        command=list(command),
        inputs=dict(inputs or {}),
        seed=seed,
        passed=all(o.passed for o in outcomes),
        certificates=outcomes,
        values=to_jsonable(values or {}),
        timings=timings,
    )
