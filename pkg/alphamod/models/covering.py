"""
Covering value objects
======================

Geometry of the covering pieces (cubes, balls, dyadic annuli), the pieces
themselves with their sampled windows, and the admissibility report.

Closure conventions used for multiplicity counts: cubes are closed, balls are
open, dyadic annuli are half-open ``{a < |xi| <= b}`` (the innermost ball is closed).
"""

import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from alphamod.exceptions import CoveringError
from alphamod.models.grid import Domain, GridSpec, SampledFunction, unit_ball_volume

CONTAINS_SLACK = 1e-12


@dataclass(frozen=True)
class PieceGeometry:
    """Shape of one covering piece.

    Args:
        shape: ``"cube"``, ``"ball"`` or ``"annulus"``
        center: Center point (the origin for annuli)
        extent: Half-width (cube), radius (ball) or ``(inner, outer)`` radii (annulus)
    """

    shape: str
    center: Tuple[float, ...]
    extent: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.shape not in ("cube", "ball", "annulus"):
            raise CoveringError(f"unknown piece shape: {self.shape}")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def inradius(self) -> float:
        if self.shape == "cube":
            return self.extent[0]
        if self.shape == "ball":
            return self.extent[0]
        inner, outer = self.extent
        return outer if inner == 0 else (outer - inner) / 2

    @property
    def circumradius(self) -> float:
        if self.shape == "cube":
            return self.extent[0] * math.sqrt(self.dim)
        if self.shape == "ball":
            return self.extent[0]
        return self.extent[1]

    @property
    def measure(self) -> float:
        n = self.dim
        if self.shape == "cube":
            return (2 * self.extent[0]) ** n
        if self.shape == "ball":
            return unit_ball_volume(n) * self.extent[0] ** n
        inner, outer = self.extent
        return unit_ball_volume(n) * (outer**n - inner**n)

    def radial_range(self) -> Tuple[float, float]:
        """(min |xi|, max |xi|) over the closed piece."""
        c = np.asarray(self.center)
        if self.shape == "annulus":
            return self.extent[0], self.extent[1]
        if self.shape == "ball":
            dist = float(np.linalg.norm(c))
            return max(dist - self.extent[0], 0.0), dist + self.extent[0]
        h = self.extent[0]
        nearest = np.maximum(np.abs(c) - h, 0.0)
        farthest = np.abs(c) + h
        return float(np.linalg.norm(nearest)), float(np.linalg.norm(farthest))

    def distance_to_points(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        offset = points - np.asarray(self.center)
        if self.shape == "cube":
            excess = np.maximum(np.abs(offset) - self.extent[0], 0.0)
            return np.linalg.norm(excess, axis=-1)
        r = np.linalg.norm(offset, axis=-1)
        if self.shape == "ball":
            return np.maximum(r - self.extent[0], 0.0)
        inner, outer = self.extent
        return np.maximum(np.maximum(inner - r, r - outer), 0.0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        offset = points - np.asarray(self.center)
        if self.shape == "cube":
            return np.all(np.abs(offset) <= self.extent[0] + CONTAINS_SLACK, axis=-1)
        r = np.linalg.norm(offset, axis=-1)
        if self.shape == "ball":
            return r < self.extent[0] - CONTAINS_SLACK
        inner, outer = self.extent
        lower = r > inner + CONTAINS_SLACK if inner > 0 else np.ones_like(r, dtype=bool)
        return lower & (r <= outer + CONTAINS_SLACK)

    def distance(self, other: "PieceGeometry") -> float:
        """Euclidean distance between the closures of two pieces of the same shape."""
        if self.shape != other.shape:
            raise CoveringError(f"cannot compare {self.shape} with {other.shape}")
        gap = np.asarray(self.center) - np.asarray(other.center)
        if self.shape == "cube":
            excess = np.maximum(np.abs(gap) - self.extent[0] - other.extent[0], 0.0)
            return float(np.linalg.norm(excess))
        if self.shape == "ball":
            return max(float(np.linalg.norm(gap)) - self.extent[0] - other.extent[0], 0.0)
        return max(other.extent[0] - self.extent[1], self.extent[0] - other.extent[1], 0.0)

    def intersects(self, other: "PieceGeometry") -> bool:
        """Whether the pieces (with their closure conventions) share a point."""
        if self.shape == "ball":
            gap = float(np.linalg.norm(np.asarray(self.center) - np.asarray(other.center)))
            return gap < self.extent[0] + other.extent[0] - CONTAINS_SLACK
        if self.shape == "annulus":
            lo = max(self.extent[0], other.extent[0])
            hi = min(self.extent[1], other.extent[1])
            if lo == 0.0:
                return True
            return hi > lo + CONTAINS_SLACK
        return self.distance(other) <= CONTAINS_SLACK


@dataclass(frozen=True)
class CoveringPiece:
    """One piece Q of a covering with its window psi_Q.

    ``window`` holds psi_Q on the xi lattice (centered order, edge-tapered); ``evaluate``
    samples the untapered psi_Q anywhere, e.g. on the eta lattice.
    """

    id: int
    label: str
    geometry: PieceGeometry
    representative: Tuple[float, ...]
    weight: float
    window: np.ndarray = field(repr=False, compare=False)
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    grid: GridSpec = field(repr=False, compare=False)

    @property
    def bracket(self) -> float:
        """<xi_Q> = (1 + |xi_Q|^2)^(1/2)."""
        return math.sqrt(1.0 + float(np.dot(self.representative, self.representative)))

    @property
    def measure(self) -> float:
        return self.geometry.measure

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self.evaluator(points)

    def window_function(self) -> SampledFunction:
        """psi_Q as a frequency-domain ``SampledFunction``."""
        return SampledFunction(self.grid, self.window, Domain.FREQUENCY)

    def summary(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "label": self.label,
            "shape": self.geometry.shape,
            "center": list(self.geometry.center),
            "extent": list(self.geometry.extent),
            "inradius": self.geometry.inradius,
            "circumradius": self.geometry.circumradius,
            "representative": list(self.representative),
            "weight": self.weight,
            "measure": self.measure,
        }


@dataclass
class AdmissibilityReport:
    """Numerical admissibility constants of a covering restricted to the band."""

    alpha: float
    piece_count: int
    band_radius: float
    partition_residual: float
    overlap_n0: int
    max_pair_neighbors: int
    enlarged_overlap: Dict[str, int]
    ratio_bound_K: float
    weight_comparability_kappa: float
    neighbor_comparability: float
    measure_ratio_range: Tuple[float, float]
    volume_ratio_range: Tuple[float, float]
    unit_ball_volume: float
    support_violations: int
    pieces_per_axis: int
    construction: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["measure_ratio_range"] = list(self.measure_ratio_range)
        data["volume_ratio_range"] = list(self.volume_ratio_range)
        return data


@dataclass(frozen=True)
class Covering:
    """Alpha-covering of the truncation band with a subordinate partition of unity."""

    alpha: float
    grid: GridSpec
    pieces: Tuple[CoveringPiece, ...]
    band_radius: float
    construction: Dict[str, Any] = field(default_factory=dict, compare=False)
    admissibility: Optional[AdmissibilityReport] = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.pieces)

    @cached_property
    def window_stack(self) -> np.ndarray:
        """All xi-lattice windows, shape ``(pieces, *grid.shape)``."""
        return np.stack([piece.window for piece in self.pieces])

    @cached_property
    def dual_window_stack(self) -> np.ndarray:
        """All windows sampled on the eta lattice (natural order), shape ``(pieces, *grid.shape)``."""
        points = self.grid.spatial_points()
        return np.stack([piece.evaluate(points) for piece in self.pieces])

    @cached_property
    def dual_band_mask(self) -> np.ndarray:
        """eta-lattice points where the windows still sum to one."""
        return np.abs(self.dual_window_stack.sum(axis=0) - 1.0) <= 1e-8

    def piece(self, piece_id: int) -> CoveringPiece:
        return self.pieces[piece_id]

    def summary(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "grid": self.grid.to_dict(),
            "band_radius": self.band_radius,
            "construction": self.construction,
            "pieces": [{**piece.summary(), "window": piece.window_function().to_envelope()} for piece in self.pieces],
            "admissibility": self.admissibility.to_dict() if self.admissibility else None,
        }
