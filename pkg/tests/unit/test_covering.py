"""
Unit Tests for Alpha-Coverings
==============================

Tests cover:
- Partition of unity on the truncation band
- Piece geometry and admissibility constants
- Parameter validation
- Window structure: translates, dilations, rim and lattice-edge decay
- Window derivative bounds and their refinement stability
"""

import math

import numpy as np
import pytest

from alphamod.core.covering import (
    _ball_centers,
    build_covering,
    cached_covering,
    validate_covering,
    window_derivative_l1,
)
from alphamod.core.grid import make_grid
from alphamod.exceptions import UnsupportedParameterError


# ============================================
# Partition of unity
# ============================================

def test_partition_residual_is_small(covering_1d):
    """Test that the windows sum to one on the band."""
    report = covering_1d.admissibility

    assert report is not None
    assert report.partition_residual <= 1e-8
    assert report.piece_count == len(covering_1d)


def test_windows_are_nonnegative_and_bounded(covering_1d):
    """Test that every window takes values in [0, 1]."""
    stack = covering_1d.window_stack

    assert stack.shape == (len(covering_1d), 64)
    assert stack.min() >= -1e-15
    assert stack.max() <= 1.0 + 1e-12


def test_windows_respect_piece_supports(covering_1d):
    """Test that no window is active away from its piece."""
    assert covering_1d.admissibility.support_violations == 0


def test_piece_ids_are_sequential(covering_1d):
    """Test that pieces come in deterministic id order."""
    assert [piece.id for piece in covering_1d.pieces] == list(range(len(covering_1d)))
    assert all(piece.weight >= 1.0 for piece in covering_1d.pieces)


def test_2d_ball_covering(grid_2d):
    """Test an intermediate alpha on a 2D grid."""
    covering = build_covering(0.5, grid_2d)

    assert covering.construction["kind"] == "balls"
    assert covering.admissibility.partition_residual <= 1e-8


# ============================================
# Window structure
# ============================================

def test_lattice_windows_are_translates(grid_1d):
    """Test psi_k(xi) = psi_0(xi - k) on the lattice for interior cubes."""
    covering = build_covering(0.0, grid_1d, validate=False)
    by_center = {piece.geometry.center[0]: piece for piece in covering.pieces}
    base = by_center[0.0].window

    for k in range(-10, 11):
        np.testing.assert_allclose(by_center[float(k)].window, np.roll(base, k), atol=1e-15)


def test_dyadic_windows_dilate(grid_1d):
    """Test psi_{j+1}(2 xi) = psi_j(xi) for every level j >= 1 inside the band."""
    covering = build_covering(1.0, grid_1d, validate=False)
    xi = grid_1d.axis_frequencies()
    small = np.abs(2 * xi) <= covering.band_radius
    doubled = np.rint(2 * xi[small]).astype(int) + grid_1d.points_per_axis // 2

    for j in range(1, len(covering) - 1):
        np.testing.assert_allclose(covering.pieces[j + 1].window[doubled], covering.pieces[j].window[small], atol=1e-15)


def test_ball_windows_vanish_at_the_rim():
    """Test that every ball window is already negligible just inside its rim, outer pieces included."""
    covering = build_covering(0.5, make_grid(1, 512, 2 * math.pi), validate=False)

    for piece in covering.pieces:
        center, radius = piece.geometry.center[0], piece.geometry.extent[0]
        near_rim = np.array([[center - 0.999 * radius], [center + 0.999 * radius]])
        assert piece.evaluate(near_rim).max() <= 1e-6, piece.label


def test_ball_windows_keep_a_guard_ring(grid_1d):
    """Test that the normalising sum runs over balls beyond the kept pieces."""
    covering = build_covering(0.5, grid_1d, validate=False)

    assert covering.construction["guard_balls"] > 0


def test_ball_centers_returns_centers_indices_and_radii():
    """Test that the ball layout comes back as matching center, index and radius arrays."""
    centers, k, radii = _ball_centers(0.5, 1, 20.0, 2.0)

    assert centers.shape == (len(k), 1)
    assert radii.shape == (len(k),)
    np.testing.assert_allclose(centers, np.abs(k) * k)
    np.testing.assert_allclose(radii, 2.0 * np.abs(centers[:, 0]) ** 0.5)
    assert np.all(np.maximum(np.abs(centers[:, 0]) - 20.0, 0.0) < radii)


def test_windows_vanish_at_the_lattice_edge(covering_1d):
    """Test that the sampled windows are zero at xi = -Nyquist."""
    assert np.all(covering_1d.window_stack[:, 0] == 0.0)


@pytest.mark.parametrize("alpha", [0.25, 0.75])
@pytest.mark.parametrize("points", [64, 256])
def test_partition_residual_intermediate_alphas(alpha, points):
    """Test the partition of unity and window supports for the remaining ball coverings."""
    report = build_covering(alpha, make_grid(1, points, 2 * math.pi)).admissibility

    assert report.partition_residual <= 1e-8
    assert report.support_violations == 0


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_comparability_constants_are_refinement_stable(alpha):
    """Test that enlarged-neighbour counts move by at most one and kappa by at most 20% under N -> 2N."""
    coarse = build_covering(alpha, make_grid(1, 128, 2 * math.pi)).admissibility
    fine = build_covering(alpha, make_grid(1, 256, 2 * math.pi)).admissibility

    for radius, count in coarse.enlarged_overlap.items():
        assert abs(fine.enlarged_overlap[radius] - count) <= 1
    ratio = fine.weight_comparability_kappa / coarse.weight_comparability_kappa
    assert 1 / 1.2 <= ratio <= 1.2


# ============================================
# Construction kinds
# ============================================

def test_lattice_covering_overlap(grid_1d):
    """Test that unit cubes overlap exactly three at a time in 1D."""
    covering = build_covering(0.0, grid_1d)

    assert covering.construction["kind"] == "lattice"
    assert covering.admissibility.overlap_n0 == 3
    assert covering.pieces[0].geometry.shape == "cube"


def test_dyadic_covering_levels(grid_1d):
    """Test that alpha = 1 builds dyadic annuli reaching past the band."""
    covering = build_covering(1.0, grid_1d)

    assert covering.construction["kind"] == "dyadic"
    assert covering.pieces[0].label == "j=0"
    outer = covering.pieces[-1].geometry.extent[1]
    assert outer >= covering.band_radius


def test_band_radius(grid_1d):
    """Test that the band is 80% of the Nyquist frequency."""
    covering = build_covering(0.5, grid_1d)

    assert covering.band_radius == pytest.approx(0.8 * 32.0)


def test_validate_is_optional(grid_1d):
    """Test that the admissibility report can be computed separately."""
    covering = build_covering(1.0, grid_1d, validate=False)

    assert covering.admissibility is None
    assert validate_covering(covering).partition_residual <= 1e-8


def test_cached_covering_reuses_instances():
    """Test that cached_covering memoises per (alpha, grid)."""
    grid = make_grid(1, 32, 2 * math.pi)

    assert cached_covering(0.5, grid) is cached_covering(0.5, make_grid(1, 32, 2 * math.pi))


# ============================================
# Error handling
# ============================================

@pytest.mark.parametrize("alpha", [-0.1, 1.5, math.inf])
def test_alpha_out_of_range(grid_1d, alpha):
    """Test that alpha outside [0, 1] raises UnsupportedParameterError."""
    with pytest.raises(UnsupportedParameterError):
        build_covering(alpha, grid_1d)


# ============================================
# Window derivatives
# ============================================

def test_window_derivative_table(grid_1d):
    """Test the per-piece L1 table of the window derivatives."""
    covering = build_covering(1.0, grid_1d)

    frame = window_derivative_l1(covering, [1])

    assert list(frame.columns) == ["piece_id", "label", "bracket", "l1_norm", "ratio"]
    assert len(frame) == len(covering)
    assert np.all(np.isfinite(frame["ratio"]))
    assert np.all(frame["l1_norm"] > 0)


@pytest.mark.parametrize("beta", [[3], [1, 1], [-1]])
def test_window_derivative_rejects_bad_order(grid_1d, beta):
    """Test that unsupported multi-indices raise UnsupportedParameterError."""
    covering = build_covering(0.0, grid_1d, validate=False)
    with pytest.raises(UnsupportedParameterError):
        window_derivative_l1(covering, beta)


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_window_l1_norms_are_uniformly_bounded(alpha):
    """Test max / min of ||F^-1 psi_Q||_1 over the pieces at N = 256."""
    covering = build_covering(alpha, make_grid(1, 256, 2 * math.pi), validate=False)

    l1 = window_derivative_l1(covering, [0])["l1_norm"]

    assert np.all(np.isfinite(l1))
    assert l1.max() / l1.min() <= 10.0


@pytest.mark.slow
def test_window_l1_is_refinement_stable():
    """Test that max_Q ||F^-1 psi_Q||_1 of the alpha = 0.5 balls stays within 20% for N in 128, 256, 512."""
    maxima = [
        window_derivative_l1(build_covering(0.5, make_grid(1, n, 2 * math.pi), validate=False), [0])["l1_norm"].max()
        for n in (128, 256, 512)
    ]

    assert max(maxima) / min(maxima) <= 1.2


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_derivative_ratio_is_bounded_and_stable(alpha):
    """Test ||d F^-1 psi_Q||_1 / <xi_Q> bounded over the pieces and within 20% under N -> 2N."""
    ratios = [
        window_derivative_l1(build_covering(alpha, make_grid(1, n, 2 * math.pi), validate=False), [1])["ratio"].max()
        for n in (128, 256)
    ]

    assert all(np.isfinite(ratios))
    assert abs(ratios[1] / ratios[0] - 1.0) <= 0.2
