from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.models.certificate import Certificate


class CatalogEntry(BaseModel):
    """A named example: how to build it and which certificates must pass."""

    model_config = {"frozen": True}

    name: str
    kind: str
    params: Dict[str, Any] = Field(default_factory=dict)
    expected: List[str]


class EntryOutcome(BaseModel):
    name: str
    kind: str
    passed: bool
    certificates: List[Certificate] = Field(default_factory=list)
    missing: List[str] = Field(default_factory=list)
    error: Optional[Dict[str, Any]] = None
    elapsed: Optional[float] = None


class CatalogReport(BaseModel):
    """Outcomes ordered by entry name."""

    entries: List[EntryOutcome] = Field(default_factory=list)
    seed: int

    @property
    def failures(self) -> List[str]:
        return [entry.name for entry in self.entries if not entry.passed]

    @property
    def passed(self) -> bool:
        return not self.failures
