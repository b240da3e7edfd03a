import logging
import sys
from typing import Optional

from app.core.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Send workbench logs to standard error; reports own standard output."""
    root = logging.getLogger("app")
    root.setLevel((level or settings.LOG_LEVEL).upper())
    if not any(getattr(h, "_workbench", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._workbench = True
        root.addHandler(handler)
