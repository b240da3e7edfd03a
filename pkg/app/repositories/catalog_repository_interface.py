from abc import ABC, abstractmethod
from typing import List, Optional

from app.models.catalog import CatalogEntry


class CatalogRepositoryInterface(ABC):
    """Interface for the example catalog."""

    @abstractmethod
    async def list_entries(self) -> List[CatalogEntry]:
        """Get all entries, sorted by name."""
        pass

    @abstractmethod
    async def get_entry(self, name: str) -> Optional[CatalogEntry]:
        """Get an entry by name."""
        pass
