"""
Verification reports
====================

``TrialRow`` is one measured (lhs, rhs) pair; ``BoundReport`` aggregates the
rows of one check, grouped by family label, with the refinement drift.
"""

import math
import statistics
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd

CSV_COLUMNS = ["check", "alpha", "trial", "seed", "lhs", "rhs", "ratio", "grid_N"]


def safe_ratio(lhs: float, rhs: float) -> float:
    """lhs / rhs, with 0 / 0 read as a trivial pass."""
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


@dataclass(frozen=True)
class TrialRow:
    check: str
    alpha: Optional[float]
    trial: int
    seed: int
    lhs: float
    rhs: float
    grid_N: int

    @property
    def ratio(self) -> float:
        return safe_ratio(self.lhs, self.rhs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "alpha": "" if self.alpha is None else self.alpha,
            "trial": self.trial,
            "seed": self.seed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "grid_N": self.grid_N,
        }


@dataclass
class FamilySummary:
    label: str
    max_ratio: float
    median_ratio: float
    refined_max_ratio: Optional[float]
    drift: Optional[float]
    trials: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "max_ratio": self.max_ratio,
            "median_ratio": self.median_ratio,
            "refined_max_ratio": self.refined_max_ratio,
            "drift": self.drift,
            "trials": self.trials,
        }


@dataclass
class BoundReport:
    """All rows of one check plus the acceptance thresholds.

    Args:
        check: Check name (``thm11``, ``lemma32``...)
        rows: Rows at the base and (optionally) refined grid
        base_N: Points per axis of the base grid
        refined_N: Points per axis of the refined grid, if refinement ran
        ceiling: Upper bound every ratio must respect (derived constant), if any
        drift_tolerance: Largest allowed relative change of the max ratio under refinement
        variant: Distinguishes reports of one check (``alpha0.5``, ``p2_q2``)
        family_ceilings: Ceilings for the families whose label starts with the key
        conditions: Extra named pass conditions (monotone decay, support leakage...)
    """

    check: str
    rows: List[TrialRow]
    base_N: int
    refined_N: Optional[int] = None
    ceiling: Optional[float] = None
    drift_tolerance: float = 0.2
    variant: Optional[str] = None
    family_ceilings: Dict[str, float] = field(default_factory=dict)
    conditions: Dict[str, bool] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.check if self.variant is None else f"{self.check}_{self.variant}"

    def labels(self) -> List[str]:
        seen: List[str] = []
        for row in self.rows:
            if row.check not in seen:
                seen.append(row.check)
        return seen

    def families(self) -> List[FamilySummary]:
        summaries = []
        for label in self.labels():
            base = [r.ratio for r in self.rows if r.check == label and r.grid_N == self.base_N]
            refined = [r.ratio for r in self.rows if r.check == label and r.grid_N == self.refined_N]
            if not base:
                continue
            top = max(base)
            refined_top = max(refined) if refined else None
            drift = None
            if refined_top is not None:
                drift = abs(refined_top - top) / top if top > 0 else abs(refined_top)
            summaries.append(
                FamilySummary(label, top, statistics.median(base), refined_top, drift, len(base))
            )
        return summaries

    @property
    def max_ratio(self) -> float:
        ratios = [r.ratio for r in self.rows if r.grid_N == self.base_N]
        return max(ratios) if ratios else 0.0

    @property
    def median_ratio(self) -> float:
        ratios = [r.ratio for r in self.rows if r.grid_N == self.base_N]
        return statistics.median(ratios) if ratios else 0.0

    @property
    def passed(self) -> bool:
        if not self.rows:
            return False
        if any(not math.isfinite(r.ratio) for r in self.rows):
            return False
        if self.ceiling is not None and any(r.ratio > self.ceiling for r in self.rows):
            return False
        for prefix, ceiling in self.family_ceilings.items():
            if any(r.ratio > ceiling for r in self.rows if r.check.startswith(prefix)):
                return False
        if not all(self.conditions.values()):
            return False
        return all(
            family.drift is None or family.drift <= self.drift_tolerance for family in self.families()
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.to_dict() for row in self.rows], columns=CSV_COLUMNS)

    def summary(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "name": self.name,
            "base_N": self.base_N,
            "refined_N": self.refined_N,
            "ceiling": self.ceiling,
            "family_ceilings": dict(self.family_ceilings),
            "conditions": dict(self.conditions),
            "drift_tolerance": self.drift_tolerance,
            "max_ratio": self.max_ratio,
            "median_ratio": self.median_ratio,
            "passed": self.passed,
            "families": [family.to_dict() for family in self.families()],
            "metadata": self.metadata,
        }
