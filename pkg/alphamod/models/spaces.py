"""
Norm parameters and breakdowns
==============================
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from alphamod.core.grid import parse_exponent

EXPONENT_LABELS = {1.0: "1", 2.0: "2", math.inf: "inf"}


class NormParams(BaseModel):
    """Parameters of an alpha-modulation norm.

    ``s`` weights function norms; ``s1`` / ``s2`` weight the x and xi variables
    of the product norm on symbols.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(0.0, ge=0.0, le=1.0, description="Covering parameter")
    p: float = Field(2.0, description="Lebesgue exponent (1, 2 or inf)")
    q: float = Field(2.0, description="Sequence exponent (1, 2 or inf)")
    s: float = Field(0.0, description="Smoothness weight for functions")
    s1: float = Field(0.0, description="Weight exponent in x")
    s2: float = Field(0.0, description="Weight exponent in xi")

    @field_validator("p", "q", mode="before")
    @classmethod
    def _exponent(cls, value: Union[float, int, str]) -> float:
        return parse_exponent(value)


@dataclass(frozen=True)
class NormContribution:
    """One row of a norm breakdown: piece ids, weight, band norm and weighted value."""

    piece_id_x: int
    piece_id_xi: Optional[int]
    weight: float
    band_value: float

    @property
    def contribution(self) -> float:
        return self.weight * self.band_value


@dataclass
class NormBreakdown:
    """Total norm and its per-piece (or per-pair) contributions, in piece-id order."""

    kind: str
    total: float
    params: NormParams
    rows: List[NormContribution] = field(default_factory=list)
    band_leakage: float = 0.0

    def to_frame(self) -> pd.DataFrame:
        records = [
            {
                "piece_id_x": row.piece_id_x,
                "piece_id_xi": row.piece_id_xi,
                "weight": row.weight,
                "band_sup": row.band_value,
                "contribution": row.contribution,
            }
            for row in self.rows
        ]
        return pd.DataFrame(records, columns=["piece_id_x", "piece_id_xi", "weight", "band_sup", "contribution"])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "total": self.total,
            "params": {
                **self.params.model_dump(),
                "p": EXPONENT_LABELS[self.params.p],
                "q": EXPONENT_LABELS[self.params.q],
            },
            "band_leakage": self.band_leakage,
            "rows": self.to_frame().to_dict(orient="records"),
        }
