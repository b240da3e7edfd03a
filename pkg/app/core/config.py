import os
from typing import Optional
from dotenv import load_dotenv
from pydantic import BaseModel

# Load environment variables from .env file
load_dotenv()


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


class MollifierTolerances(BaseModel):
    """Quadrature and convergence tolerances for the mollifier experiments."""

    model_config = {"frozen": True}

    normalization: float = 1e-8
    profile: float = 1e-10
    max_h_times_n: float = 0.2
    resolution: float = 0.01
    doubling_relative: float = 0.10
    doubling_floor: float = 1e-9
    decay_target: float = 1e-2


class Settings:
    """Application settings configuration."""

    # Worker pool
    THREADS: int = max(1, _env_int("GRPD_CONV_THREADS", os.cpu_count() or 1))

    # Randomized suites
    SEED: Optional[int] = (
        int(os.environ["GRPD_CONV_SEED"]) if os.getenv("GRPD_CONV_SEED") else None
    )
    RANDOM_PAIRS: int = _env_int("GRPD_CONV_RANDOM_PAIRS", 100)
    RANDOM_TRIPLES: int = _env_int("GRPD_CONV_RANDOM_TRIPLES", 25)
    RANDOM_MAX_POINTS: int = _env_int("GRPD_CONV_RANDOM_MAX_POINTS", 20)
    RANDOM_GAUGE_INSTANCES: int = _env_int("GRPD_CONV_RANDOM_GAUGE_INSTANCES", 500)

    # Hard limits
    LP_MAX_DIMENSION: int = 16
    LP_MAX_GENERATORS: int = 64
    TORUS_MAX_MODE: int = 64
    SEARCH_MAX_POINTS: int = 40

    MOLLIFIER: MollifierTolerances = MollifierTolerances()

    # Application settings
    APP_NAME: str = "groupoid-convolution-workbench"
    APP_VERSION: str = "1.0.0"
    FORMAT_VERSION: int = 1
    LOG_LEVEL: str = os.getenv("GRPD_CONV_LOG_LEVEL", "WARNING").upper()


settings = Settings()
