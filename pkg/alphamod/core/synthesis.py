"""
Deterministic test data
=======================

``synthesize(family, grid, seed)`` samples a test function or symbol from a
family spec. Parameters that would put content outside the truncation band
(80% of the Nyquist frequency on either lattice) are rejected.
"""

import logging
import math
from typing import List, Sequence, Union

import numpy as np

from alphamod.core.grid import eta_to_xi, frequency_to_space, lattice_point
from alphamod.core.windows import standard_bump
from alphamod.exceptions import BandViolationError, GridError, UnsupportedParameterError
from alphamod.models.families import (
    BandLimitedFamily,
    BandLimitedSymbolFamily,
    DerivativeFamily,
    Family,
    GaussianFamily,
    LipschitzSineFamily,
    MultiplicationFamily,
    MultiplierFamily,
    PlaneWaveFamily,
    SmoothSymbolFamily,
    TrigTerm,
)
from alphamod.models.grid import Domain, GridSpec, SampledFunction, SampledSymbol, SymbolDomain

logger = logging.getLogger(__name__)

BAND_FRACTION = 0.8
GAUSSIAN_TAIL = 6.0


def synthesize(family: Family, grid: GridSpec, seed: int = 0) -> Union[SampledFunction, SampledSymbol]:
    """Sample ``family`` on ``grid``; random families draw from ``numpy.random.default_rng(seed)``.

    Raises:
        BandViolationError: Spectral content would leave the truncation band
        GridError: Frequencies off the lattice or supports not fitting the torus
    """
    handlers = {
        "gaussian": _gaussian,
        "plane_wave": _plane_wave,
        "band_limited_random": _band_limited,
        "lipschitz_sine": _lipschitz_sine,
        "multiplier_symbol": _multiplier,
        "derivative_symbol": _derivative,
        "multiplication_symbol": _multiplication,
        "smooth_symbol": _smooth_symbol,
        "band_limited_symbol": _band_limited_symbol,
    }
    handler = handlers.get(family.kind)
    if handler is None:
        raise UnsupportedParameterError(f"unknown family kind: {family.kind}")
    return handler(family, grid, seed)


# ============================================================================
# HELPERS
# ============================================================================

def _vector(values: Sequence[float], grid: GridSpec, name: str) -> np.ndarray:
    if len(values) != grid.dim:
        raise GridError(f"{name} must have {grid.dim} components, got {len(values)}")
    return np.asarray(values, dtype=np.float64)


def _check_frequency(freq: np.ndarray, grid: GridSpec) -> None:
    lattice_point(freq, grid.frequency_step)
    if np.max(np.abs(freq)) > BAND_FRACTION * grid.nyquist + 1e-12:
        raise BandViolationError(
            f"frequency {freq.tolist()} exceeds {BAND_FRACTION:.0%} of Nyquist ({grid.nyquist:.4g})"
        )


def _check_shift(shift: np.ndarray, grid: GridSpec) -> None:
    lattice_point(shift, grid.spacing)
    if np.max(np.abs(shift)) > BAND_FRACTION * grid.period / 2 + 1e-12:
        raise BandViolationError(f"eta shift {shift.tolist()} exceeds {BAND_FRACTION:.0%} of the eta range")


def _multi_indices(bound: int, dim: int) -> np.ndarray:
    axis = np.arange(-bound, bound + 1)
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)


def _trig_sum(terms: List[TrigTerm], grid: GridSpec) -> np.ndarray:
    points = grid.spatial_points()
    out = np.zeros(grid.shape)
    for term in terms:
        freq = _vector(term.frequency, grid, "frequency")
        _check_frequency(freq, grid)
        out += term.amplitude * np.cos(points @ freq + term.phase)
    return out


# ============================================================================
# FUNCTIONS
# ============================================================================

def _gaussian(family: GaussianFamily, grid: GridSpec, seed: int) -> SampledFunction:
    center = _vector(family.center or [0.0] * grid.dim, grid, "center")
    if GAUSSIAN_TAIL / family.width > BAND_FRACTION * grid.nyquist:
        raise BandViolationError(f"gaussian width {family.width} too narrow for N={grid.points_per_axis}")
    if np.max(np.abs(center)) + GAUSSIAN_TAIL * family.width > grid.period / 2:
        raise GridError(f"gaussian width {family.width} does not fit in the period {grid.period}")
    offset = grid.spatial_points() - center
    values = np.exp(-np.sum(offset**2, axis=-1) / (2 * family.width**2))
    return SampledFunction(grid, values, Domain.SPACE)


def _plane_wave(family: PlaneWaveFamily, grid: GridSpec, seed: int) -> SampledFunction:
    freq = _vector(family.frequency, grid, "frequency")
    _check_frequency(freq, grid)
    return SampledFunction(grid, np.exp(1j * (grid.spatial_points() @ freq)), Domain.SPACE)


def _band_limited(family: BandLimitedFamily, grid: GridSpec, seed: int) -> SampledFunction:
    if family.band > BAND_FRACTION * grid.nyquist:
        raise BandViolationError(f"band {family.band} exceeds {BAND_FRACTION:.0%} of Nyquist ({grid.nyquist:.4g})")
    bound = int(math.floor(family.band / grid.frequency_step + 1e-9))
    rng = np.random.default_rng(seed)
    width = 2 * bound + 1
    block = (rng.standard_normal((width,) * grid.dim) + 1j * rng.standard_normal((width,) * grid.dim)) / math.sqrt(2)
    if family.real:
        flipped = block[(slice(None, None, -1),) * grid.dim]
        block = 0.5 * (block + np.conj(flipped))
    spectrum = np.zeros(grid.shape, dtype=np.complex128)
    origin = grid.points_per_axis // 2
    spectrum[(slice(origin - bound, origin + bound + 1),) * grid.dim] = block
    values = frequency_to_space(spectrum, grid, tuple(range(grid.dim)))
    if family.real:
        values = values.real
    return SampledFunction(grid, values, Domain.SPACE)


def _lipschitz_sine(family: LipschitzSineFamily, grid: GridSpec, seed: int) -> SampledFunction:
    return SampledFunction(grid, family.offset + _trig_sum(family.terms, grid), Domain.SPACE)


# ============================================================================
# SYMBOLS
# ============================================================================

def _broadcast_xi(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    return np.broadcast_to(values.reshape((1,) * grid.dim + grid.shape), grid.shape * 2)


def _broadcast_x(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    return np.broadcast_to(values.reshape(grid.shape + (1,) * grid.dim), grid.shape * 2)


def _multiplier(family: MultiplierFamily, grid: GridSpec, seed: int) -> SampledSymbol:
    xi = grid.frequency_points()
    m = np.full(grid.shape, complex(family.constant, family.constant_imag))
    for term in family.terms:
        shift = _vector(term.shift, grid, "shift")
        _check_shift(shift, grid)
        m = m + complex(term.amplitude, term.amplitude_imag) * np.exp(1j * (xi @ shift))
    return SampledSymbol(grid, _broadcast_xi(m, grid), SymbolDomain.X_XI)


def _derivative(family: DerivativeFamily, grid: GridSpec, seed: int) -> SampledSymbol:
    if family.axis >= grid.dim:
        raise UnsupportedParameterError(f"axis {family.axis} out of range for dim {grid.dim}")
    m = 1j * grid.frequency_mesh()[family.axis]
    return SampledSymbol(grid, _broadcast_xi(m, grid), SymbolDomain.X_XI)


def _multiplication(family: MultiplicationFamily, grid: GridSpec, seed: int) -> SampledSymbol:
    a = family.constant + _trig_sum(family.terms, grid)
    return SampledSymbol(grid, _broadcast_x(a.astype(np.complex128), grid), SymbolDomain.X_XI)


def _smooth_symbol(family: SmoothSymbolFamily, grid: GridSpec, seed: int) -> SampledSymbol:
    lattice_point([family.x_step], grid.frequency_step)
    lattice_point([family.eta_step], grid.spacing)
    _check_frequency(np.full(grid.dim, family.x_modes * family.x_step), grid)
    _check_shift(np.full(grid.dim, family.xi_modes * family.eta_step), grid)

    p = _multi_indices(family.x_modes, grid.dim)
    q = _multi_indices(family.xi_modes, grid.dim)
    rng = np.random.default_rng(seed)
    decay = 1.0 + np.sum(p**2, axis=1)[:, None] + np.sum(q**2, axis=1)[None, :]
    coeffs = (rng.standard_normal(decay.shape) + 1j * rng.standard_normal(decay.shape)) / decay

    x = grid.spatial_points().reshape(-1, grid.dim)
    xi = grid.frequency_points().reshape(-1, grid.dim)
    ex = np.exp(1j * family.x_step * (p @ x.T))
    exi = np.exp(1j * family.eta_step * (q @ xi.T))
    values = ex.T @ coeffs @ exi
    return SampledSymbol(grid, values.reshape(grid.shape * 2), SymbolDomain.X_XI)


def _band_limited_symbol(family: BandLimitedSymbolFamily, grid: GridSpec, seed: int) -> SampledSymbol:
    lattice_point([family.x_step], grid.frequency_step)
    _check_frequency(np.full(grid.dim, family.x_modes * family.x_step), grid)
    if family.omega > BAND_FRACTION * grid.period / 2:
        raise BandViolationError(f"omega {family.omega} exceeds {BAND_FRACTION:.0%} of the eta range")
    if family.omega < 4 * grid.spacing:
        raise GridError(f"omega {family.omega} is resolved by fewer than 8 eta lattice points")

    p = _multi_indices(family.x_modes, grid.dim)
    m = _multi_indices(family.harmonics, grid.dim)
    rng = np.random.default_rng(seed)
    decay = 1.0 + np.sum(p**2, axis=1)[:, None] + np.sum(m**2, axis=1)[None, :]
    coeffs = (rng.standard_normal(decay.shape) + 1j * rng.standard_normal(decay.shape)) / decay

    x = grid.spatial_points().reshape(-1, grid.dim)
    eta = x
    envelope = standard_bump(np.linalg.norm(eta, axis=1) / family.omega)
    ex = np.exp(1j * family.x_step * (p @ x.T))
    eeta = np.exp(1j * family.shift * (m @ eta.T)) * envelope[None, :]
    transformed = (ex.T @ coeffs @ eeta).reshape(grid.shape * 2)
    values = eta_to_xi(transformed, grid, tuple(range(grid.dim, 2 * grid.dim)))
    return SampledSymbol(grid, values, SymbolDomain.X_XI)
