"""
Unit Tests for Alpha-Modulation Norms
=====================================

Tests cover:
- Function norms on plane waves and Gaussians
- Reconstruction from band components
- The product norm on symbols
- Embedding exponents
- Parameter validation
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from alphamod.core.covering import build_covering, cached_covering
from alphamod.core.grid import lp_norm, make_grid
from alphamod.core.spaces import (
    alpha_modulation_norm,
    band_component,
    besov_norm,
    nu_indices,
    product_symbol_norm,
    reconstruct_function,
    reconstruct_symbol,
)
from alphamod.core.synthesis import synthesize
from alphamod.exceptions import UnsupportedParameterError
from alphamod.models.families import BandLimitedFamily, GaussianFamily, MultiplicationFamily, TrigTerm
from alphamod.models.grid import SampledFunction, SampledSymbol
from alphamod.models.spaces import NormParams


# ============================================
# Fixtures
# ============================================

@pytest.fixture
def plane_wave(grid_1d):
    """e^{i 3 x}, a single frequency."""
    return SampledFunction(grid_1d, np.exp(3j * grid_1d.axis_nodes()))


@pytest.fixture
def gaussian(grid_1d):
    """Gaussian of width 1/2, spectrally inside the band."""
    return synthesize(GaussianFamily(width=0.5), grid_1d)


# ============================================
# Function norms
# ============================================

def test_plane_wave_norm_on_unit_cubes(grid_1d, plane_wave):
    """Test that a plane wave at xi = 3 only meets the cube centered at 3."""
    covering = build_covering(0.0, grid_1d)
    params = NormParams(alpha=0.0, p="inf", q=1, s=1.0)

    breakdown = alpha_modulation_norm(plane_wave, params, covering)

    assert breakdown.total == pytest.approx(math.sqrt(10.0), rel=1e-12)
    assert breakdown.band_leakage == pytest.approx(0.0, abs=1e-12)


def test_plane_wave_besov_norm(grid_1d, plane_wave):
    """Test that the dyadic pieces at xi = 3 add up to one for s = 0."""
    assert besov_norm(plane_wave, "inf", 1, 0.0) == pytest.approx(1.0, rel=1e-12)


def test_alpha_one_matches_besov(grid_1d, gaussian):
    """Test that alpha = 1 reproduces the dyadic Besov norm."""
    covering = build_covering(1.0, grid_1d)
    params = NormParams(alpha=1.0, p=2, q=2, s=1.0)

    modulation = alpha_modulation_norm(gaussian, params, covering).total

    assert modulation == pytest.approx(besov_norm(gaussian, 2, 2, 1.0), rel=1e-10)


def test_l2_norm_bounded_by_function_norm(covering_1d, gaussian):
    """Test that the s = 0, (2, 2) norm never exceeds ||f||_2 for nonnegative windows summing to one."""
    params = NormParams(alpha=covering_1d.alpha, p=2, q=2, s=0.0)

    total = alpha_modulation_norm(gaussian, params, covering_1d).total

    assert 0 < total <= lp_norm(gaussian, 2) * (1 + 1e-12)


def test_breakdown_rows_in_piece_order(covering_1d, gaussian):
    """Test that the breakdown holds one row per piece in id order."""
    params = NormParams(alpha=covering_1d.alpha, p=1, q="inf", s=0.5)

    breakdown = alpha_modulation_norm(gaussian, params, covering_1d)
    frame = breakdown.to_frame()

    assert list(frame["piece_id_x"]) == list(range(len(covering_1d)))
    assert breakdown.total == pytest.approx(frame["contribution"].max())
    assert breakdown.to_dict()["params"]["q"] == "inf"


def test_norm_rejects_alpha_mismatch(grid_1d, gaussian):
    """Test that the norm alpha must match the covering alpha."""
    covering = build_covering(0.5, grid_1d)
    with pytest.raises(UnsupportedParameterError):
        alpha_modulation_norm(gaussian, NormParams(alpha=0.0), covering)


@settings(max_examples=10, deadline=None)
@given(
    alpha=st.sampled_from([0.0, 0.5, 1.0]),
    c=st.floats(min_value=-20.0, max_value=20.0).filter(lambda value: abs(value) > 1e-3),
)
def test_norm_is_homogeneous(alpha, c):
    """Test ||c f|| = |c| ||f|| for every covering kind."""
    grid = make_grid(1, 64, 2 * math.pi)
    f = synthesize(GaussianFamily(width=0.5), grid)
    covering = cached_covering(alpha, grid)
    params = NormParams(alpha=alpha, p=1, q=2, s=0.5)

    scaled = alpha_modulation_norm(SampledFunction(grid, c * f.values), params, covering).total

    assert scaled == pytest.approx(abs(c) * alpha_modulation_norm(f, params, covering).total, rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(
    alpha=st.sampled_from([0.0, 0.5, 1.0]),
    p=st.sampled_from([1, 2, "inf"]),
    q=st.sampled_from([1, 2, "inf"]),
    seeds=st.tuples(st.integers(0, 2**16), st.integers(0, 2**16)),
)
def test_norm_satisfies_triangle_inequality(alpha, p, q, seeds):
    """Test ||f + g|| <= ||f|| + ||g|| for random band-limited functions."""
    grid = make_grid(1, 64, 2 * math.pi)
    family = BandLimitedFamily(band=10.0)
    f, g = (synthesize(family, grid, seed=seed) for seed in seeds)
    covering = cached_covering(alpha, grid)
    params = NormParams(alpha=alpha, p=p, q=q, s=0.5)

    combined = alpha_modulation_norm(SampledFunction(grid, f.values + g.values), params, covering).total
    separate = alpha_modulation_norm(f, params, covering).total + alpha_modulation_norm(g, params, covering).total

    assert combined <= separate * (1 + 1e-10)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_norm_is_monotone_in_smoothness(alpha, grid_1d):
    """Test that raising s never lowers the norm since every weight is at least one."""
    f = synthesize(BandLimitedFamily(band=10.0), grid_1d, seed=3)
    covering = cached_covering(alpha, grid_1d)
    totals = [
        alpha_modulation_norm(f, NormParams(alpha=alpha, p=2, q=2, s=s), covering).total
        for s in (-1.0, 0.0, 0.5, 1.0, 2.0)
    ]

    assert all(low <= high * (1 + 1e-12) for low, high in zip(totals, totals[1:]))


# ============================================
# Reconstruction
# ============================================

def test_reconstruct_function(covering_1d, gaussian):
    """Test that the band components add back up to f."""
    back = reconstruct_function(gaussian, covering_1d)

    np.testing.assert_allclose(back.values, gaussian.values, atol=1e-10)


def test_band_components_sum_to_function(grid_1d, gaussian):
    """Test summing psi_Q(D) f piece by piece."""
    covering = build_covering(0.5, grid_1d)

    total = sum(band_component(gaussian, piece).values for piece in covering.pieces)

    np.testing.assert_allclose(total, gaussian.values, atol=1e-10)


def test_reconstruct_symbol(grid_32):
    """Test that a band-limited symbol is recovered from its pair components."""
    covering = build_covering(0.0, grid_32)
    sigma = synthesize(MultiplicationFamily(constant=1.0, terms=[TrigTerm(amplitude=0.5, frequency=[2.0])]), grid_32)

    back = reconstruct_symbol(sigma, covering)

    np.testing.assert_allclose(back.values, sigma.values, atol=1e-10)


# ============================================
# Symbol norms
# ============================================

def test_constant_symbol_norm(covering_1d):
    """Test that sigma = 1 has product norm one when s1 = s2 = 0."""
    grid = covering_1d.grid
    sigma = SampledSymbol(grid, np.ones(grid.shape * 2))
    params = NormParams(alpha=covering_1d.alpha)

    breakdown = product_symbol_norm(sigma, params, covering_1d)

    assert breakdown.total == pytest.approx(1.0, rel=1e-10)
    assert breakdown.kind == "symbol"


def test_multiplication_symbol_norm(grid_1d):
    """Test cos(3x) as a symbol: two pairs of sup 1/2, each weighted by <3>^s1."""
    covering = build_covering(0.0, grid_1d)
    sigma = synthesize(MultiplicationFamily(terms=[TrigTerm(amplitude=1.0, frequency=[3.0])]), grid_1d)
    params = NormParams(alpha=0.0, s1=1.0, s2=0.0)

    breakdown = product_symbol_norm(sigma, params, covering)

    assert breakdown.total == pytest.approx(math.sqrt(10.0), rel=1e-9)


def test_zero_symbol_norm(grid_32):
    """Test that the zero symbol has norm zero and no rows."""
    covering = build_covering(0.0, grid_32)
    sigma = SampledSymbol(grid_32, np.zeros(grid_32.shape * 2))

    breakdown = product_symbol_norm(sigma, NormParams(alpha=0.0), covering)

    assert breakdown.total == 0.0
    assert breakdown.rows == []


# ============================================
# Embedding exponents
# ============================================

@pytest.mark.parametrize(
    "p,q,expected",
    [
        ("inf", 1, (Fraction(1), Fraction(0))),
        (2, 2, (Fraction(0), Fraction(0))),
        (1, "inf", (Fraction(0), Fraction(-1))),
        (2, 1, (Fraction(1, 2), Fraction(0))),
        (4, 2, (Fraction(1, 4), Fraction(-1, 4))),
        ("3/2", 3, (Fraction(0), Fraction(-1, 3))),
        (Fraction(3, 2), 3, (Fraction(0), Fraction(-1, 3))),
        (1.5, "inf", (Fraction(0), Fraction(-2, 3))),
    ],
)
def test_nu_indices(p, q, expected):
    """Test the embedding exponents, exactly, on integer and rational exponent pairs."""
    assert nu_indices(p, q) == expected


@pytest.mark.parametrize("p", [0.5, "1/2", 0, "abc", -2])
def test_nu_indices_rejects_out_of_range(p):
    """Test that exponents below 1 or unparsable raise UnsupportedParameterError."""
    with pytest.raises(UnsupportedParameterError):
        nu_indices(p, 2)


@given(
    p=st.fractions(min_value=1, max_value=50, max_denominator=12),
    q=st.fractions(min_value=1, max_value=50, max_denominator=12),
)
def test_nu_indices_ranges(p, q):
    """Test 0 <= nu1 <= 1, -1 <= nu2 <= 0 and nu1 - nu2 <= 1 on rational exponents."""
    nu1, nu2 = nu_indices(p, q)

    assert 0 <= nu1 <= 1
    assert -1 <= nu2 <= 0
    assert nu1 - nu2 <= 1


# ============================================
# Parameter validation
# ============================================

@pytest.mark.parametrize("field,value", [("p", 3), ("q", "0.5"), ("alpha", 1.5), ("alpha", -0.1)])
def test_norm_params_validation(field, value):
    """Test that invalid exponents and alphas are rejected."""
    with pytest.raises(ValidationError):
        NormParams(**{field: value})


def test_norm_params_accept_infinity_spelling():
    """Test that exponent strings are normalised."""
    params = NormParams(p="inf", q="1")

    assert params.p == math.inf
    assert params.q == 1.0
