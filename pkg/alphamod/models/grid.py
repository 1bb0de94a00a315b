"""
Grid value objects
==================

``GridSpec`` describes the periodic lattice (and its dual frequency lattice),
``SampledFunction`` / ``SampledSymbol`` carry samples together with a domain
tag, and ``BandSupport`` describes a compact frequency set.

Conventions:
    x_j  = -L/2 + j L/N                 j = 0..N-1        (spatial, natural order)
    xi_k = 2 pi k / L                   k = -N/2..N/2-1   (frequency, centered order)
    eta  lives on the spatial lattice (dual of xi), natural order
"""

import base64
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from alphamod.exceptions import DomainTagError, GridError

ENVELOPE_VERSION = 1
ENVELOPE_ENCODING = "complex128-le-interleaved"


class Domain(str, Enum):
    """Domain of a sampled function."""

    SPACE = "space"
    FREQUENCY = "frequency"


class SymbolDomain(str, Enum):
    """Domain of a sampled symbol: first variable (x or y), second variable (xi or eta)."""

    X_XI = "x-xi"
    Y_XI = "y-xi"
    X_ETA = "x-eta"
    Y_ETA = "y-eta"

    @property
    def first(self) -> str:
        return self.value.split("-")[0]

    @property
    def second(self) -> str:
        return self.value.split("-")[1]

    @classmethod
    def from_parts(cls, first: str, second: str) -> "SymbolDomain":
        return cls(f"{first}-{second}")


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic lattice on [-L/2, L/2)^n with N points per axis.

    Args:
        dim: Spatial dimension n (1 or 2)
        points_per_axis: N, even and at least 16
        period: L > 0
    """

    dim: int
    points_per_axis: int
    period: float

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if self.points_per_axis < 16 or self.points_per_axis % 2:
            raise GridError(f"points_per_axis must be even and >= 16, got {self.points_per_axis}")
        if not (math.isfinite(self.period) and self.period > 0):
            raise GridError(f"period must be positive and finite, got {self.period}")
        object.__setattr__(self, "period", float(self.period))

    @property
    def spacing(self) -> float:
        return self.period / self.points_per_axis

    @property
    def frequency_step(self) -> float:
        return 2 * math.pi / self.period

    @property
    def nyquist(self) -> float:
        """Largest representable frequency magnitude per axis, pi N / L."""
        return math.pi * self.points_per_axis / self.period

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dim

    def axis_nodes(self) -> np.ndarray:
        """Spatial nodes x_j along one axis (also the eta lattice)."""
        n = self.points_per_axis
        return -self.period / 2 + np.arange(n) * self.spacing

    def axis_indices(self) -> np.ndarray:
        """Centered integer frequency indices k = -N/2..N/2-1."""
        n = self.points_per_axis
        return np.arange(-n // 2, n // 2)

    def axis_frequencies(self) -> np.ndarray:
        return self.axis_indices() * self.frequency_step

    def spatial_mesh(self) -> np.ndarray:
        """Array of shape ``(dim, *shape)`` with the coordinates of every spatial node."""
        return np.stack(np.meshgrid(*([self.axis_nodes()] * self.dim), indexing="ij"))

    def frequency_mesh(self) -> np.ndarray:
        return np.stack(np.meshgrid(*([self.axis_frequencies()] * self.dim), indexing="ij"))

    def spatial_points(self) -> np.ndarray:
        """Spatial nodes as points, shape ``(*shape, dim)``."""
        return np.moveaxis(self.spatial_mesh(), 0, -1)

    def frequency_points(self) -> np.ndarray:
        return np.moveaxis(self.frequency_mesh(), 0, -1)

    def sign(self, total_dims: Optional[int] = None, axes: Optional[Tuple[int, ...]] = None) -> np.ndarray:
        """(-1)^(k_1+...+k_n) for centered indices, broadcastable over ``axes`` of a larger array."""
        total_dims = self.dim if total_dims is None else total_dims
        axes = tuple(range(self.dim)) if axes is None else axes
        one_axis = np.where(self.axis_indices() % 2 == 0, 1.0, -1.0)
        out = np.ones((1,) * total_dims)
        for axis in axes:
            shape = [1] * total_dims
            shape[axis] = self.points_per_axis
            out = out * one_axis.reshape(shape)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "points_per_axis": self.points_per_axis, "period": self.period}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GridSpec":
        return cls(int(data["dim"]), int(data["points_per_axis"]), float(data["period"]))


def _frozen_copy(values: np.ndarray, dtype: Any) -> np.ndarray:
    out = np.array(values, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


def _encode_array(values: np.ndarray) -> Dict[str, Any]:
    raw = np.ascontiguousarray(values, dtype="<c16").tobytes()
    return {
        "shape": list(values.shape),
        "encoding": ENVELOPE_ENCODING,
        "payload": base64.b64encode(raw).decode("ascii"),
    }


def _decode_array(data: Dict[str, Any]) -> np.ndarray:
    if data.get("encoding") != ENVELOPE_ENCODING:
        raise GridError(f"unsupported payload encoding: {data.get('encoding')}")
    raw = base64.b64decode(data["payload"], validate=True)
    return np.frombuffer(raw, dtype="<c16").astype(np.complex128).reshape(tuple(data["shape"]))


@dataclass(frozen=True)
class SampledFunction:
    """Samples of a function on the spatial lattice or its Fourier transform on the frequency lattice."""

    grid: GridSpec
    values: np.ndarray
    domain: Domain = Domain.SPACE

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", Domain(self.domain))
        object.__setattr__(self, "values", _frozen_copy(self.values, np.complex128))
        if self.values.shape != self.grid.shape:
            raise GridError(f"values shape {self.values.shape} does not match grid shape {self.grid.shape}")

    def require(self, domain: Domain) -> None:
        if self.domain is not domain:
            raise DomainTagError(f"expected a {domain.value}-domain function, got {self.domain.value}")

    def to_envelope(self) -> Dict[str, Any]:
        return {
            "version": ENVELOPE_VERSION,
            "kind": "function",
            "grid": self.grid.to_dict(),
            "domain_tag": self.domain.value,
            **_encode_array(self.values),
        }


@dataclass(frozen=True)
class SampledSymbol:
    """Samples of a symbol on the 2n-dimensional product lattice.

    The first ``dim`` axes hold x (or y), the last ``dim`` axes hold xi (or eta).
    """

    grid: GridSpec
    values: np.ndarray
    domain: SymbolDomain = SymbolDomain.X_XI

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", SymbolDomain(self.domain))
        object.__setattr__(self, "values", _frozen_copy(self.values, np.complex128))
        expected = self.grid.shape * 2
        if self.values.shape != expected:
            raise GridError(f"symbol shape {self.values.shape} does not match {expected}")

    def require(self, domain: SymbolDomain) -> None:
        if self.domain is not domain:
            raise DomainTagError(f"expected a {domain.value} symbol, got {self.domain.value}")

    def to_envelope(self) -> Dict[str, Any]:
        return {
            "version": ENVELOPE_VERSION,
            "kind": "symbol",
            "grid": self.grid.to_dict(),
            "domain_tag": self.domain.value,
            **_encode_array(self.values),
        }


def from_envelope(data: Dict[str, Any]) -> "SampledFunction | SampledSymbol":
    """Rebuild a sampled object from its JSON envelope."""
    if data.get("version") != ENVELOPE_VERSION:
        raise GridError(f"unsupported envelope version: {data.get('version')}")
    grid = GridSpec.from_dict(data["grid"])
    values = _decode_array(data)
    kind = data.get("kind")
    if kind == "function":
        return SampledFunction(grid, values, Domain(data["domain_tag"]))
    if kind == "symbol":
        return SampledSymbol(grid, values, SymbolDomain(data["domain_tag"]))
    raise DomainTagError(f"unknown envelope kind: {kind}")


def dumps_envelope(obj: "SampledFunction | SampledSymbol") -> str:
    return json.dumps(obj.to_envelope(), sort_keys=True)


@dataclass(frozen=True)
class BandComponent:
    """One box or ball of a band support."""

    kind: str
    center: Tuple[float, ...]
    radius: float


@dataclass(frozen=True)
class BandSupport:
    """Finite union of pairwise disjoint boxes (half-width ``radius``) and open balls.

    Used as the compact frequency set Omega of the band-limited estimates.
    """

    dim: int
    components: Tuple[BandComponent, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.components:
            raise GridError("band support needs at least one component")
        for comp in self.components:
            if comp.kind not in ("box", "ball"):
                raise GridError(f"unknown band component kind: {comp.kind}")
            if len(comp.center) != self.dim or comp.radius <= 0:
                raise GridError(f"invalid band component: {comp}")
        for i, a in enumerate(self.components):
            for b in self.components[i + 1:]:
                gap = np.linalg.norm(np.subtract(a.center, b.center))
                if gap < _outer_radius(a, self.dim) + _outer_radius(b, self.dim):
                    raise GridError("band support components must be well separated")

    @classmethod
    def box(cls, half_width: float, dim: int, center: Optional[List[float]] = None) -> "BandSupport":
        c = tuple(float(v) for v in (center or [0.0] * dim))
        return cls(dim, (BandComponent("box", c, float(half_width)),))

    @classmethod
    def ball(cls, radius: float, dim: int, center: Optional[List[float]] = None) -> "BandSupport":
        c = tuple(float(v) for v in (center or [0.0] * dim))
        return cls(dim, (BandComponent("ball", c, float(radius)),))

    @property
    def measure(self) -> float:
        total = 0.0
        for comp in self.components:
            if comp.kind == "box":
                total += (2 * comp.radius) ** self.dim
            else:
                total += unit_ball_volume(self.dim) * comp.radius**self.dim
        return total

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Membership mask for points of shape ``(..., dim)``; boxes closed, balls open."""
        points = np.asarray(points, dtype=np.float64)
        mask = np.zeros(points.shape[:-1], dtype=bool)
        for comp in self.components:
            offset = points - np.asarray(comp.center)
            if comp.kind == "box":
                mask |= np.all(np.abs(offset) <= comp.radius, axis=-1)
            else:
                mask |= np.linalg.norm(offset, axis=-1) < comp.radius
        return mask

    def lattice_measure(self, points: np.ndarray, cell_volume: float) -> float:
        """Riemann-sum measure: number of lattice points inside times the cell volume."""
        return float(np.count_nonzero(self.contains(points))) * cell_volume


def _outer_radius(comp: BandComponent, dim: int) -> float:
    return comp.radius * (math.sqrt(dim) if comp.kind == "box" else 1.0)


def unit_ball_volume(dim: int) -> float:
    """Volume of the unit ball in R^dim."""
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)
