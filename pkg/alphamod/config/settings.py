"""
Runtime settings
================

Environment-driven knobs (prefix ``ALPHAMOD_``), loaded once at import time.
Numerical defaults for the verification suites live in ``defaults.yaml``.
"""

import logging
import math
import os
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

CONFIG_DIR = Path(__file__).resolve().parent
DEFAULTS_FILE = CONFIG_DIR / "defaults.yaml"


class Settings(BaseSettings):
    """Process-wide settings, overridable through ``ALPHAMOD_*`` variables or a ``.env`` file."""

    model_config = SettingsConfigDict(
        env_prefix="ALPHAMOD_",
        env_file=".env",
        extra="ignore",
        case_sensitive=False,
    )

    JOBS: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1, description="Worker processes for trials")
    LOG_LEVEL: str = Field("INFO", description="Root log level")
    STRICT_BAND: bool = Field(False, description="Raise instead of warning on band violations")
    PROGRESS: bool = Field(False, description="Show tqdm progress bars for serial runs")
    BAND_TOLERANCE: float = Field(1e-10, gt=0, description="Relative spectral leakage allowed outside the band")
    DEFAULT_PERIOD: float = Field(2 * math.pi, gt=0, description="Default torus period L")
    MAX_POINTS_1D: int = Field(512, ge=16, description="Largest N accepted by dense operator routines in 1D")
    MAX_POINTS_2D: int = Field(48, ge=16, description="Largest N per axis accepted by dense operator routines in 2D")

    @field_validator("LOG_LEVEL")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"Unknown log level: {value}")
        return level


settings = Settings()
