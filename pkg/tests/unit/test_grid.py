"""
Unit Tests for the Grid Layer
=============================

Tests cover:
- GridSpec validation and lattice geometry
- Fourier transforms (normalisation, inversion, Plancherel)
- Exponent parsing and lattice norms
- Sampled-object envelopes and domain tags
- Band supports
"""

import base64
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphamod.core.grid import (
    check_same_grid,
    eta_to_xi,
    forward_ft,
    inverse_ft,
    lattice_point,
    lp_norm,
    make_grid,
    parse_exponent,
    partial_ft,
    refine,
    spectral_gradient,
    xi_to_eta,
)
from alphamod.exceptions import DomainTagError, GridError, UnsupportedParameterError
from alphamod.models.grid import (
    BandComponent,
    BandSupport,
    Domain,
    SampledFunction,
    SampledSymbol,
    SymbolDomain,
    dumps_envelope,
    from_envelope,
)


# ============================================
# GridSpec
# ============================================

@pytest.mark.parametrize(
    "dim,points,period",
    [
        (3, 16, 1.0), (0, 16, 1.0), (1, 15, 1.0), (1, 8, 1.0),
        (1, 6, 1.0), (1, 16, 0.0), (1, 16, -2.0), (1, 16, math.inf),
    ],
)
def test_make_grid_rejects_invalid_parameters(dim, points, period):
    """Test that invalid dimension, point count or period raise GridError."""
    with pytest.raises(GridError):
        make_grid(dim, points, period)


def test_grid_geometry(grid_1d):
    """Test spacing, frequency step and Nyquist of the 2 pi torus."""
    assert grid_1d.spacing == pytest.approx(2 * math.pi / 64)
    assert grid_1d.frequency_step == pytest.approx(1.0)
    assert grid_1d.nyquist == pytest.approx(32.0)
    assert grid_1d.shape == (64,)

    nodes = grid_1d.axis_nodes()
    assert nodes[0] == pytest.approx(-math.pi)
    assert nodes[-1] < math.pi
    assert grid_1d.axis_indices()[0] == -32
    assert grid_1d.axis_indices()[-1] == 31


def test_grid_points_shape(grid_2d):
    """Test that point arrays put the coordinate last."""
    assert grid_2d.spatial_points().shape == (16, 16, 2)
    assert grid_2d.frequency_points().shape == (16, 16, 2)
    assert grid_2d.size == 256


def test_refine_doubles_points(grid_1d):
    """Test that refinement keeps the torus and doubles N."""
    fine = refine(grid_1d)

    assert fine.points_per_axis == 128
    assert fine.period == grid_1d.period
    assert fine.dim == grid_1d.dim


def test_check_same_grid_mismatch(grid_1d, grid_32):
    """Test that mismatched grids raise GridError."""
    assert check_same_grid(grid_1d, make_grid(1, 64, 2 * math.pi)) == grid_1d
    with pytest.raises(GridError):
        check_same_grid(grid_1d, grid_32)


# ============================================
# Transforms
# ============================================

def test_forward_ft_of_gaussian(grid_1d):
    """Test the continuous normalisation on a Gaussian of width 1/2."""
    x = grid_1d.axis_nodes()
    f = SampledFunction(grid_1d, np.exp(-2.0 * x**2))

    F = forward_ft(f)
    xi = grid_1d.axis_frequencies()
    expected = math.sqrt(2 * math.pi) * 0.5 * np.exp(-(xi**2) / 8.0)

    assert F.domain is Domain.FREQUENCY
    np.testing.assert_allclose(F.values, expected, atol=1e-7)


def test_forward_ft_of_plane_wave_is_a_spike(grid_1d):
    """Test that e^{i 3 x} lands on the single frequency xi = 3."""
    x = grid_1d.axis_nodes()
    F = forward_ft(SampledFunction(grid_1d, np.exp(3j * x)))

    peak = int(np.argmax(np.abs(F.values)))
    assert grid_1d.axis_frequencies()[peak] == pytest.approx(3.0)
    assert abs(F.values[peak]) == pytest.approx(grid_1d.period)
    assert np.count_nonzero(np.abs(F.values) > 1e-9) == 1


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_plancherel_identity(seed):
    """Test ||f^||_2^2 = (2 pi)^n ||f||_2^2 for arbitrary samples."""
    grid = make_grid(2, 16, 3.0)
    rng = np.random.default_rng(seed)
    f = SampledFunction(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))

    lhs = lp_norm(forward_ft(f), 2) ** 2
    rhs = (2 * math.pi) ** 2 * lp_norm(f, 2) ** 2

    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_inverse_ft_inverts_forward(grid_2d, rng):
    """Test that inverse_ft(forward_ft(f)) recovers f."""
    f = SampledFunction(grid_2d, rng.standard_normal(grid_2d.shape))

    back = inverse_ft(forward_ft(f))

    assert back.domain is Domain.SPACE
    np.testing.assert_allclose(back.values, f.values, atol=1e-12)


def test_xi_eta_transforms_are_inverse(grid_32, rng):
    """Test that eta_to_xi undoes xi_to_eta."""
    values = rng.standard_normal(grid_32.shape) + 1j * rng.standard_normal(grid_32.shape)

    back = eta_to_xi(xi_to_eta(values, grid_32, (0,)), grid_32, (0,))

    np.testing.assert_allclose(back, values, atol=1e-12)


def test_transform_rejects_wrong_domain(grid_1d):
    """Test that forward_ft refuses frequency-domain input."""
    F = SampledFunction(grid_1d, np.ones(grid_1d.shape), Domain.FREQUENCY)
    with pytest.raises(DomainTagError):
        forward_ft(F)


def test_partial_ft_domain_tags(grid_32):
    """Test that partial transforms update tags and check their starting domain."""
    sigma = SampledSymbol(grid_32, np.ones(grid_32.shape * 2))

    over_xi = partial_ft(sigma, "xi")
    assert over_xi.domain is SymbolDomain.X_ETA
    assert partial_ft(sigma, "x").domain is SymbolDomain.Y_XI

    back = partial_ft(over_xi, "xi", inverse=True)
    assert back.domain is SymbolDomain.X_XI
    np.testing.assert_allclose(back.values, sigma.values, atol=1e-12)

    with pytest.raises(DomainTagError):
        partial_ft(sigma, "xi", inverse=True)
    with pytest.raises(UnsupportedParameterError):
        partial_ft(sigma, "z")


def test_spectral_gradient_of_sine(grid_1d):
    """Test that the gradient of sin(3x) is 3 cos(3x)."""
    x = grid_1d.axis_nodes()
    grad = spectral_gradient(SampledFunction(grid_1d, np.sin(3 * x)))

    assert grad.shape == (1, 64)
    np.testing.assert_allclose(grad[0].real, 3 * np.cos(3 * x), atol=1e-10)


# ============================================
# Exponents and norms
# ============================================

@pytest.mark.parametrize(
    "token,expected",
    [
        (1, 1.0), (2, 2.0), ("2", 2.0), ("inf", math.inf),
        ("Infinity", math.inf), ("∞", math.inf), (math.inf, math.inf),
    ],
)
def test_parse_exponent(token, expected):
    """Test the accepted spellings of 1, 2 and infinity."""
    assert parse_exponent(token) == expected


@pytest.mark.parametrize("token", [3, 0.5, "p", "1.5"])
def test_parse_exponent_rejects_others(token):
    """Test that exponents outside {1, 2, inf} raise UnsupportedParameterError."""
    with pytest.raises((UnsupportedParameterError, ValueError)):
        parse_exponent(token)


def test_lp_norms_of_constant(grid_1d):
    """Test L^1, L^2 and L^inf norms of the constant 2 on the 2 pi torus."""
    f = SampledFunction(grid_1d, np.full(grid_1d.shape, 2.0))

    assert lp_norm(f, 1) == pytest.approx(4 * math.pi)
    assert lp_norm(f, 2) == pytest.approx(math.sqrt(8 * math.pi))
    assert lp_norm(f, "inf") == pytest.approx(2.0)


def test_lattice_point():
    """Test lattice coordinates and the off-lattice error."""
    assert lattice_point([0.5, -0.75], 0.25) == (2, -3)
    with pytest.raises(GridError):
        lattice_point([0.3], 0.25)


# ============================================
# Sampled objects
# ============================================

def test_sampled_function_shape_mismatch(grid_1d):
    """Test that values of the wrong shape raise GridError."""
    with pytest.raises(GridError):
        SampledFunction(grid_1d, np.zeros(32))


def test_sampled_symbol_shape_mismatch(grid_32):
    """Test that symbols need the 2n-dimensional product shape."""
    with pytest.raises(GridError):
        SampledSymbol(grid_32, np.zeros(grid_32.shape))


def test_sampled_values_are_read_only(grid_1d):
    """Test that samples cannot be mutated after construction."""
    f = SampledFunction(grid_1d, np.zeros(grid_1d.shape))
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_envelope_round_trip(grid_2d, rng):
    """Test that a function survives the JSON envelope."""
    f = SampledFunction(grid_2d, rng.standard_normal(grid_2d.shape) + 1j * rng.standard_normal(grid_2d.shape))

    back = from_envelope(json.loads(dumps_envelope(f)))

    assert isinstance(back, SampledFunction)
    assert back.grid == grid_2d
    assert back.domain is Domain.SPACE
    np.testing.assert_array_equal(back.values, f.values)


def test_envelope_rejects_unknown_version(grid_1d):
    """Test that envelopes from another version raise GridError."""
    data = SampledFunction(grid_1d, np.zeros(grid_1d.shape)).to_envelope()
    data["version"] = 99
    with pytest.raises(GridError):
        from_envelope(data)


def test_envelope_payload_layout(grid_1d):
    """Test that the payload is base64 of little-endian interleaved (re, im) doubles."""
    values = np.arange(64) + 0.5j
    data = SampledFunction(grid_1d, values).to_envelope()

    floats = np.frombuffer(base64.b64decode(data["payload"]), dtype="<f8")

    assert data["encoding"] == "complex128-le-interleaved"
    assert data["domain_tag"] == "space"
    np.testing.assert_array_equal(floats[0::2], np.arange(64))
    np.testing.assert_array_equal(floats[1::2], np.full(64, 0.5))


def test_envelope_rejects_unknown_encoding(grid_1d):
    """Test that a payload in another encoding raises GridError."""
    data = SampledFunction(grid_1d, np.zeros(grid_1d.shape)).to_envelope()
    data["encoding"] = "float32"
    with pytest.raises(GridError):
        from_envelope(data)


# ============================================
# Band supports
# ============================================

def test_band_support_measures():
    """Test box and ball measures in 2D."""
    assert BandSupport.box(1.0, 2).measure == pytest.approx(4.0)
    assert BandSupport.ball(1.0, 2).measure == pytest.approx(math.pi)


def test_band_support_contains():
    """Test that boxes are closed and balls open."""
    points = np.array([[1.0], [0.5], [1.5]])

    assert BandSupport.box(1.0, 1).contains(points).tolist() == [True, True, False]
    assert BandSupport.ball(1.0, 1).contains(points).tolist() == [False, True, False]


def test_band_support_rejects_overlap():
    """Test that overlapping components raise GridError."""
    with pytest.raises(GridError):
        BandSupport(1, (BandComponent("box", (0.0,), 1.0), BandComponent("ball", (1.5,), 1.0)))
