"""
Alpha-coverings
===============

Builds a concrete alpha-covering of the truncation band ``[-0.8 Xi, 0.8 Xi]^n``
together with a subordinate smooth partition of unity, and measures its
admissibility constants numerically.

    alpha = 0        unit cubes k + [-1, 1]^n, tensor-product periodised bumps
    alpha = 1        dyadic annuli, Littlewood-Paley windows
    0 < alpha < 1    balls B(c_k, r |c_k|^alpha), c_k = |k|^(alpha/(1-alpha)) k

Windows sampled on the xi lattice are multiplied by ``edge_taper``, equal to 1
on the band and vanishing at the lattice edge.
"""

import logging
import math
from functools import lru_cache, partial
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from alphamod.core.grid import band_mask, frequency_to_space, lattice_lp
from alphamod.core.windows import BallWindows, DyadicWindows, LatticeWindows, edge_taper
from alphamod.exceptions import CoveringError, UnsupportedParameterError
from alphamod.models.covering import AdmissibilityReport, Covering, CoveringPiece, PieceGeometry
from alphamod.models.grid import GridSpec, unit_ball_volume

logger = logging.getLogger(__name__)

BAND_FRACTION = 0.8
DENOMINATOR_FLOOR = 1e-6
MAX_DOUBLINGS = 6
WINDOW_FLOOR = 1e-14
MIN_PIECES_PER_AXIS = 8


def build_covering(
    alpha: float,
    grid: GridSpec,
    band_fraction: float = BAND_FRACTION,
    validate: bool = True,
) -> Covering:
    """Build the alpha-covering of the band and its partition of unity.

    Args:
        alpha: Covering parameter in [0, 1]
        grid: Lattice the windows are sampled on
        band_fraction: Band half-width as a fraction of the Nyquist frequency
        validate: Attach an ``AdmissibilityReport``

    Returns:
        Covering with pieces in deterministic id order

    Raises:
        UnsupportedParameterError: If alpha is outside [0, 1]
        CoveringError: If the ball construction cannot cover the band
    """
    if not 0.0 <= alpha <= 1.0:
        raise UnsupportedParameterError(f"alpha must be in [0, 1], got {alpha}")
    band = band_fraction * grid.nyquist
    if alpha == 0.0:
        pieces, construction = _lattice_pieces(grid, band)
    elif alpha == 1.0:
        pieces, construction = _dyadic_pieces(grid, band)
    else:
        pieces, construction = _ball_pieces(alpha, grid, band)
    covering = Covering(float(alpha), grid, tuple(pieces), band, construction)
    logger.info(f"Built alpha={alpha} covering: {len(pieces)} pieces, band radius {band:.4g}")
    if validate:
        covering = Covering(
            covering.alpha, grid, covering.pieces, band, construction, validate_covering(covering)
        )
    return covering


@lru_cache(maxsize=32)
def cached_covering(alpha: float, grid: GridSpec) -> Covering:
    """Memoised ``build_covering`` for the verification loops."""
    return build_covering(alpha, grid)


# ============================================================================
# CONSTRUCTIONS
# ============================================================================

def _on_lattice(point: Sequence[float], grid: GridSpec) -> Tuple[float, ...]:
    step = grid.frequency_step
    limit = grid.points_per_axis // 2 - 1
    return tuple(float(np.clip(round(v / step), -limit, limit) * step) for v in point)


def _bracket(point: Sequence[float]) -> float:
    return math.sqrt(1.0 + float(np.dot(point, point)))


def _index_box(bound: int, dim: int) -> np.ndarray:
    axis = np.arange(-bound, bound + 1)
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)


def _lattice_pieces(grid: GridSpec, band: float) -> Tuple[List[CoveringPiece], Dict]:
    family = LatticeWindows(grid.dim)
    points = grid.frequency_points()
    bound = int(math.ceil(band + 1.0)) - 1
    taper = edge_taper(points, band, grid.nyquist)
    pieces = []
    for k in _index_box(bound, grid.dim):
        center = tuple(float(v) for v in k)
        rep = _on_lattice(center, grid)
        evaluator = partial(family.evaluate, center)
        pieces.append(
            CoveringPiece(
                id=len(pieces),
                label=f"k={tuple(int(v) for v in k)}",
                geometry=PieceGeometry("cube", center, (1.0,)),
                representative=rep,
                weight=_bracket(rep),
                window=evaluator(points) * taper,
                evaluator=evaluator,
                grid=grid,
            )
        )
    return pieces, {"kind": "lattice", "index_bound": bound}


def _dyadic_pieces(grid: GridSpec, band: float) -> Tuple[List[CoveringPiece], Dict]:
    family = DyadicWindows(grid.dim)
    points = grid.frequency_points()
    reach = band * math.sqrt(grid.dim)
    levels = [0]
    while 2.0 ** (levels[-1]) < reach:
        levels.append(levels[-1] + 1)
    taper = edge_taper(points, band, grid.nyquist)
    pieces = []
    for j in levels:
        if j == 0:
            extent = (0.0, 2.0)
            rep = (0.0,) * grid.dim
            weight = 1.0
        else:
            extent = (2.0 ** (j - 1), 2.0 ** (j + 1))
            rep = _on_lattice((2.0**j,) + (0.0,) * (grid.dim - 1), grid)
            weight = 2.0**j
        evaluator = partial(family.evaluate, j)
        pieces.append(
            CoveringPiece(
                id=len(pieces),
                label=f"j={j}",
                geometry=PieceGeometry("annulus", (0.0,) * grid.dim, extent),
                representative=rep,
                weight=weight,
                window=evaluator(points) * taper,
                evaluator=evaluator,
                grid=grid,
            )
        )
    return pieces, {"kind": "dyadic", "levels": len(levels)}


def _ball_centers(alpha: float, dim: int, reach: float, scale: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Centers c_k, indices k and radii of every ball meeting the box ``[-reach, reach]^n``."""
    exponent = alpha / (1.0 - alpha)
    bound = 1
    while bound ** (1.0 / (1.0 - alpha)) - reach <= scale * (math.sqrt(dim) * bound) ** exponent:
        bound += 1
    k = _index_box(bound, dim)
    k = k[np.any(k != 0, axis=1)]
    norms = np.linalg.norm(k, axis=1)
    centers = (norms**exponent)[:, None] * k
    radii = scale * np.linalg.norm(centers, axis=1) ** alpha
    keep = _box_gap(centers, reach) < radii
    return centers[keep], k[keep], radii[keep]


def _box_gap(centers: np.ndarray, half_width: float) -> np.ndarray:
    return np.linalg.norm(np.maximum(np.abs(centers) - half_width, 0.0), axis=1)


def _ball_pieces(alpha: float, grid: GridSpec, band: float) -> Tuple[List[CoveringPiece], Dict]:
    """Pieces are the balls meeting the band; the normalising sum also runs over a guard ring.

    The guard ring holds every ball meeting the box widened by three piece radii,
    so sum_l g_l on the support of a kept piece equals the untruncated sum there.
    """
    points = grid.frequency_points()
    inside = band_mask(grid, band / grid.nyquist)
    scale = 2.0 * math.sqrt(grid.dim)
    for doubling in range(MAX_DOUBLINGS + 1):
        centers, _, radii = _ball_centers(alpha, grid.dim, band, scale)
        guard_reach = band + 3.0 * float(radii.max())
        centers, indices, radii = _ball_centers(alpha, grid.dim, guard_reach, scale)
        kept = np.flatnonzero(_box_gap(centers, band) < radii)
        family = BallWindows(centers, alpha, scale)
        denominator = family.denominator(points)
        supported = inside.copy()
        for index in kept:
            supported |= family.bump(index, points) > 0
        floor = float(denominator[supported].min())
        if floor >= DENOMINATOR_FLOOR:
            break
        logger.warning(f"Ball covering alpha={alpha}: denominator floor {floor:.3g} with r={scale:.3g}, doubling r")
        scale *= 2.0
    else:
        raise CoveringError(
            f"alpha={alpha} ball covering leaves band points uncovered after {MAX_DOUBLINGS} doublings"
        )

    taper = edge_taper(points, band, grid.nyquist)
    pieces = []
    for index in kept:
        center, k = centers[index], indices[index]
        rep = _on_lattice(center, grid)
        evaluator = partial(family.evaluate, int(index))
        pieces.append(
            CoveringPiece(
                id=len(pieces),
                label=f"k={tuple(int(v) for v in k)}",
                geometry=PieceGeometry("ball", tuple(float(v) for v in center), (float(radii[index]),)),
                representative=rep,
                weight=_bracket(rep),
                window=family.evaluate(int(index), points, denominator) * taper,
                evaluator=evaluator,
                grid=grid,
            )
        )
    construction = {
        "kind": "balls",
        "scale": scale,
        "doublings": doubling,
        "denominator_floor": floor,
        "guard_balls": int(len(centers) - len(kept)),
    }
    return pieces, construction


# ============================================================================
# ADMISSIBILITY
# ============================================================================

def _pairwise_distances(covering: Covering) -> Tuple[np.ndarray, np.ndarray]:
    """(distance, intersects) matrices between all pieces."""
    geometries = [piece.geometry for piece in covering.pieces]
    shape = geometries[0].shape
    if shape == "annulus":
        count = len(geometries)
        dist = np.array([[a.distance(b) for b in geometries] for a in geometries])
        meets = np.array([[a.intersects(b) for b in geometries] for a in geometries])
        return dist.reshape(count, count), meets.reshape(count, count)
    centers = np.array([g.center for g in geometries])
    extents = np.array([g.extent[0] for g in geometries])
    gap = centers[:, None, :] - centers[None, :, :]
    reach = extents[:, None] + extents[None, :]
    if shape == "cube":
        excess = np.maximum(np.abs(gap) - reach[..., None], 0.0)
        dist = np.linalg.norm(excess, axis=-1)
        return dist, dist <= 1e-12
    centre_dist = np.linalg.norm(gap, axis=-1)
    return np.maximum(centre_dist - reach, 0.0), centre_dist < reach - 1e-12


def _pieces_per_axis(covering: Covering) -> int:
    grid = covering.grid
    axis_points = np.zeros((grid.points_per_axis, grid.dim))
    axis_points[:, 0] = grid.axis_frequencies()
    axis_points = axis_points[np.abs(axis_points[:, 0]) <= covering.band_radius]
    return sum(1 for piece in covering.pieces if np.any(piece.evaluate(axis_points) > WINDOW_FLOOR))


def validate_covering(covering: Covering) -> AdmissibilityReport:
    """Measure partition residual, overlap and comparability constants on the band."""
    grid = covering.grid
    alpha = covering.alpha
    points = grid.frequency_points()
    inside = band_mask(grid, covering.band_radius / grid.nyquist)
    band_points = points[inside]
    cell_diagonal = grid.frequency_step * math.sqrt(grid.dim)

    total = covering.window_stack.sum(axis=0)
    residual = float(np.max(np.abs(total[inside] - 1.0)))

    multiplicity = np.zeros(len(band_points), dtype=int)
    violations = 0
    for piece in covering.pieces:
        multiplicity += piece.geometry.contains(band_points)
        active = piece.window > WINDOW_FLOOR
        outside = piece.geometry.distance_to_points(points) > cell_diagonal * (1 + 1e-9)
        violations += int(np.count_nonzero(active & outside))

    dist, meets = _pairwise_distances(covering)
    enlarged = {str(radius): int((dist < radius).sum(axis=1).max()) for radius in (1, 2)}

    brackets = np.array([piece.bracket for piece in covering.pieces])
    kappa = 1.0
    ratio_k = 1.0
    measure_ratios = []
    inner_volume_ratios = []
    outer_volume_ratios = []
    s_n = unit_ball_volume(grid.dim)
    for piece, bracket in zip(covering.pieces, brackets):
        lo, hi = piece.geometry.radial_range()
        kappa = max(kappa, _bracket([hi]) / bracket, bracket / _bracket([lo]))
        r_q, big_r = piece.geometry.inradius, piece.geometry.circumradius
        ratio_k = max(ratio_k, big_r / r_q)
        measure_ratios.append(piece.measure / bracket ** (alpha * grid.dim))
        inner_volume_ratios.append(piece.measure / (s_n * r_q**grid.dim))
        outer_volume_ratios.append(piece.measure / (s_n * big_r**grid.dim))

    near = dist < 1.0
    pair_ratio = brackets[:, None] / brackets[None, :]
    neighbor = float(np.max(np.where(near, np.maximum(pair_ratio, 1.0 / pair_ratio), 1.0)))

    per_axis = _pieces_per_axis(covering)
    if per_axis < MIN_PIECES_PER_AXIS:
        logger.warning(
            f"alpha={alpha} covering has only {per_axis} pieces along an axis at N={grid.points_per_axis}"
        )
    if residual > 1e-8:
        logger.warning(f"alpha={alpha} partition residual {residual:.3g} exceeds 1e-8")

    return AdmissibilityReport(
        alpha=alpha,
        piece_count=len(covering.pieces),
        band_radius=covering.band_radius,
        partition_residual=residual,
        overlap_n0=int(multiplicity.max()),
        max_pair_neighbors=int(meets.sum(axis=1).max()),
        enlarged_overlap=enlarged,
        ratio_bound_K=float(ratio_k),
        weight_comparability_kappa=float(kappa),
        neighbor_comparability=neighbor,
        measure_ratio_range=(float(min(measure_ratios)), float(max(measure_ratios))),
        volume_ratio_range=(float(min(inner_volume_ratios)), float(max(outer_volume_ratios))),
        unit_ball_volume=s_n,
        support_violations=violations,
        pieces_per_axis=per_axis,
        construction=dict(covering.construction),
    )


def window_derivative_l1(covering: Covering, beta: Sequence[int]) -> pd.DataFrame:
    """L1 norms of F^-1[(i xi)^beta psi_Q] per piece, and their ratio to <xi_Q>^|beta|.

    Raises:
        UnsupportedParameterError: If |beta| > 2 or beta has the wrong length
    """
    grid = covering.grid
    beta = tuple(int(b) for b in beta)
    if len(beta) != grid.dim or any(b < 0 for b in beta):
        raise UnsupportedParameterError(f"beta must be {grid.dim} nonnegative integers, got {beta}")
    order = sum(beta)
    if order > 2:
        raise UnsupportedParameterError(f"|beta| must be at most 2, got {order}")

    xi = grid.frequency_mesh()
    factor = np.ones(grid.shape, dtype=np.complex128)
    for axis, power in enumerate(beta):
        factor = factor * (1j * xi[axis]) ** power
    axes = tuple(range(1, grid.dim + 1))
    spatial = frequency_to_space(covering.window_stack * factor, grid, axes)
    cell = grid.spacing**grid.dim

    rows = []
    for piece, values in zip(covering.pieces, spatial):
        l1 = lattice_lp(values, 1.0, cell)
        rows.append(
            {
                "piece_id": piece.id,
                "label": piece.label,
                "bracket": piece.bracket,
                "l1_norm": l1,
                "ratio": l1 / piece.bracket**order,
            }
        )
    return pd.DataFrame(rows, columns=["piece_id", "label", "bracket", "l1_norm", "ratio"])
