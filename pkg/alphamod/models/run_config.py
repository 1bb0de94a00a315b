"""
Run configuration
=================

Validated view of one command-line invocation. Grid and alpha preconditions
are checked here, before any computation starts.
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from alphamod.models.grid import GridSpec

OutputFormat = Literal["csv", "json"]


class RunConfig(BaseModel):
    """Parsed command line: verb, grid, suite controls, tolerances and output paths."""

    model_config = ConfigDict(frozen=True)

    command: str = Field(..., description="Verb, e.g. 'covering validate' or 'verify thm11'")
    alphas: List[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0], description="Covering parameters")
    dim: int = Field(1, description="Space dimension n")
    points_per_axis: int = Field(128, description="Lattice points per axis N")
    period: float = Field(2 * math.pi, description="Torus period L")
    trials: Optional[int] = Field(None, ge=1, description="Trials per check (config default if unset)")
    seed: int = Field(42, description="Base seed of every random draw")
    jobs: Optional[int] = Field(None, ge=1, description="Worker processes")
    refine: bool = Field(True, description="Repeat checks on the refined grid")
    strict_band: Optional[bool] = Field(None, description="Raise on band violations")
    config_path: Optional[Path] = Field(None, description="YAML overlay for the verification defaults")
    input_path: Optional[Path] = None
    symbol_path: Optional[Path] = None
    lipschitz_path: Optional[Path] = None
    output_path: Optional[Path] = None
    output_format: OutputFormat = "json"
    overrides: Dict[str, Any] = Field(default_factory=dict, description="Tolerance overrides")

    @field_validator("alphas")
    @classmethod
    def _alpha_range(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("at least one alpha is required")
        for alpha in values:
            if not 0.0 <= alpha <= 1.0:
                raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        return values

    @model_validator(mode="after")
    def _grid_is_valid(self) -> "RunConfig":
        GridSpec(self.dim, self.points_per_axis, self.period)
        return self

    def grid(self) -> GridSpec:
        return GridSpec(self.dim, self.points_per_axis, self.period)

    def suite_overrides(self) -> Dict[str, Any]:
        """Overlay that pins the verification suite to this run's grid."""
        suite = {"dim": self.dim, "points_per_axis": self.points_per_axis, "period": self.period}
        merged = dict(self.overrides)
        merged["suite"] = {**merged.get("suite", {}), **suite}
        return merged
