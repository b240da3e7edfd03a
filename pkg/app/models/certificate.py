from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class Certificate(BaseModel):
    """Outcome of one exact or numerical check.

    ``witness`` is only set when ``passed`` is false; ``details`` holds the
    computed values (ranks, dimensions, rational strings) and any notes.
    """

    name: str
    passed: bool
    witness: Optional[Any] = None
    details: Dict[str, Any] = Field(default_factory=dict)


def passed(name: str, **details: Any) -> Certificate:
    return Certificate(name=name, passed=True, details=details)


def failed(name: str, witness: Any, **details: Any) -> Certificate:
    return Certificate(name=name, passed=False, witness=witness, details=details)
