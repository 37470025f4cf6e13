"""
Runtime settings loaded from the environment (and an optional .env file).
"""

import os
import logging

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    """Process-wide defaults; every value can be overridden per call."""

    log_level: str = "INFO"
    output_dir: str = "results"
    blowup_threshold: float = Field(default=1e6, gt=0)
    membership_tol: float = Field(default=1e-12, ge=0)
    samples: int = Field(default=10_000, ge=1)


def load_settings() -> Settings:
    """Build Settings from TRD_* environment variables after loading .env."""
    load_dotenv()
    raw = {
        'log_level': os.getenv('TRD_LOG_LEVEL'),
        'output_dir': os.getenv('TRD_OUTPUT_DIR'),
        'blowup_threshold': os.getenv('TRD_BLOWUP_THRESHOLD'),
        'membership_tol': os.getenv('TRD_MEMBERSHIP_TOL'),
        'samples': os.getenv('TRD_SAMPLES'),
    }
    settings = Settings(**{key: value for key, value in raw.items() if value is not None})
    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings
