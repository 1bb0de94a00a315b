"""
Grid and discrete Fourier transforms
====================================

FFT-backed transforms with the continuous normalisation
``f^(xi) = int e^{-i x.xi} f(x) dx`` approximated by Riemann sums, so that

    forward_ft(f)[k] = (L/N)^n  sum_j e^{-i x_j.xi_k} f(x_j)
    inverse_ft(F)[j] = L^{-n}   sum_k e^{ i x_j.xi_k} F(xi_k)

are exact inverses and satisfy the discrete Plancherel identity
``||f^||_2^2 = (2 pi)^n ||f||_2^2`` with the weights used by ``lp_norm``.

The symbol transforms along xi map onto the eta lattice, which coincides with
the spatial lattice.
"""

import logging
import math
from typing import Sequence, Tuple, Union

import numpy as np

from alphamod.exceptions import DomainTagError, GridError, UnsupportedParameterError
from alphamod.models.grid import Domain, GridSpec, SampledFunction, SampledSymbol, SymbolDomain

logger = logging.getLogger(__name__)

Exponent = Union[float, int, str]


def make_grid(dim: int, points_per_axis: int, period: float) -> GridSpec:
    """Build a ``GridSpec``; raises ``GridError`` on invalid parameters."""
    return GridSpec(dim, points_per_axis, period)


def refine(grid: GridSpec) -> GridSpec:
    """Same torus, twice the points per axis."""
    return GridSpec(grid.dim, 2 * grid.points_per_axis, grid.period)


def check_same_grid(*grids: GridSpec) -> GridSpec:
    first = grids[0]
    for other in grids[1:]:
        if other != first:
            raise GridError(f"grid mismatch: {first} vs {other}")
    return first


# ============================================================================
# AXIS-WISE TRANSFORMS
# ============================================================================

def space_to_frequency(values: np.ndarray, grid: GridSpec, axes: Tuple[int, ...]) -> np.ndarray:
    """Spatial (natural order) to frequency (centered order) along ``axes``."""
    sign = grid.sign(values.ndim, axes)
    weight = grid.spacing ** len(axes)
    return weight * sign * np.fft.fftshift(np.fft.fftn(values, axes=axes), axes=axes)


def frequency_to_space(values: np.ndarray, grid: GridSpec, axes: Tuple[int, ...]) -> np.ndarray:
    """Inverse of ``space_to_frequency``."""
    sign = grid.sign(values.ndim, axes)
    weight = (grid.points_per_axis / grid.period) ** len(axes)
    return weight * np.fft.ifftn(np.fft.ifftshift(sign * values, axes=axes), axes=axes)


def xi_to_eta(values: np.ndarray, grid: GridSpec, axes: Tuple[int, ...]) -> np.ndarray:
    """Fourier transform in a frequency variable: xi lattice (centered) to eta lattice (natural).

    ``out[j] = (2 pi / L)^n sum_k e^{-i xi_k.eta_j} values[k]``
    """
    sign = grid.sign(values.ndim, axes)
    weight = grid.frequency_step ** len(axes)
    return weight * np.fft.fftn(np.fft.ifftshift(sign * values, axes=axes), axes=axes)


def eta_to_xi(values: np.ndarray, grid: GridSpec, axes: Tuple[int, ...]) -> np.ndarray:
    """Inverse of ``xi_to_eta``: ``out[k] = (2 pi)^{-n} (L/N)^n sum_j e^{i xi_k.eta_j} values[j]``."""
    sign = grid.sign(values.ndim, axes)
    weight = (grid.period / (2 * math.pi)) ** len(axes)
    return weight * sign * np.fft.fftshift(np.fft.ifftn(values, axes=axes), axes=axes)


# ============================================================================
# FUNCTION TRANSFORMS
# ============================================================================

def forward_ft(f: SampledFunction) -> SampledFunction:
    f.require(Domain.SPACE)
    axes = tuple(range(f.grid.dim))
    return SampledFunction(f.grid, space_to_frequency(f.values, f.grid, axes), Domain.FREQUENCY)


def inverse_ft(F: SampledFunction) -> SampledFunction:
    F.require(Domain.FREQUENCY)
    axes = tuple(range(F.grid.dim))
    return SampledFunction(F.grid, frequency_to_space(F.values, F.grid, axes), Domain.SPACE)


def partial_ft(sigma: SampledSymbol, variable: str, inverse: bool = False) -> SampledSymbol:
    """Fourier transform of a symbol in one of its two variables.

    Args:
        sigma: Sampled symbol
        variable: ``"x"`` (x <-> y, first n axes) or ``"xi"`` (xi <-> eta, last n axes)
        inverse: Transform back instead of forward

    Raises:
        DomainTagError: If the symbol is not in the domain the transform starts from
    """
    n = sigma.grid.dim
    first, second = sigma.domain.first, sigma.domain.second
    if variable == "x":
        axes = tuple(range(n))
        expected, target = ("y", "x") if inverse else ("x", "y")
        if first != expected:
            raise DomainTagError(f"partial_ft over x needs first variable {expected}, got {sigma.domain.value}")
        fn = frequency_to_space if inverse else space_to_frequency
        return SampledSymbol(sigma.grid, fn(sigma.values, sigma.grid, axes), SymbolDomain.from_parts(target, second))
    if variable == "xi":
        axes = tuple(range(n, 2 * n))
        expected, target = ("eta", "xi") if inverse else ("xi", "eta")
        if second != expected:
            raise DomainTagError(f"partial_ft over xi needs second variable {expected}, got {sigma.domain.value}")
        fn = eta_to_xi if inverse else xi_to_eta
        return SampledSymbol(sigma.grid, fn(sigma.values, sigma.grid, axes), SymbolDomain.from_parts(first, target))
    raise UnsupportedParameterError(f"variable must be 'x' or 'xi', got {variable!r}")


# ============================================================================
# NORMS
# ============================================================================

def parse_exponent(p: Exponent) -> float:
    """Normalise a Lebesgue exponent to 1.0, 2.0 or inf."""
    if isinstance(p, str):
        token = p.strip().lower()
        value = math.inf if token in ("inf", "infinity", "∞") else float(token)
    else:
        value = float(p)
    if value not in (1.0, 2.0, math.inf):
        raise UnsupportedParameterError(f"exponent must be 1, 2 or inf, got {p!r}")
    return value


def lattice_lp(values: np.ndarray, p: float, cell: float) -> float:
    """Discrete L^p norm of an array with cell volume ``cell``."""
    mags = np.abs(values)
    if p == math.inf:
        return float(mags.max()) if mags.size else 0.0
    if p == 1.0:
        return float(cell * mags.sum())
    return float(math.sqrt(cell * np.sum(mags * mags)))


def lp_norm(f: SampledFunction, p: Exponent) -> float:
    """L^p norm with weight (L/N)^n in space and (2 pi/L)^n in frequency."""
    exponent = parse_exponent(p)
    cell = f.grid.spacing if f.domain is Domain.SPACE else f.grid.frequency_step
    return lattice_lp(f.values, exponent, cell**f.grid.dim)


# ============================================================================
# DIFFERENTIATION
# ============================================================================

def spectral_gradient(f: SampledFunction) -> np.ndarray:
    """Gradient samples of shape ``(dim, *shape)``; the unpaired Nyquist mode is dropped."""
    F = forward_ft(f)
    grid = f.grid
    axes = tuple(range(grid.dim))
    xi = grid.frequency_mesh()
    nyquist_free = np.all(grid.frequency_mesh() > -grid.nyquist + 0.5 * grid.frequency_step, axis=0)
    parts = []
    for axis in range(grid.dim):
        spectrum = np.where(nyquist_free, 1j * xi[axis] * F.values, 0.0)
        parts.append(frequency_to_space(spectrum, grid, axes))
    return np.stack(parts)


def frequency_leakage(spectrum: np.ndarray, outside: np.ndarray) -> float:
    """Relative l2 energy of ``spectrum`` on the ``outside`` mask."""
    total = float(np.sum(np.abs(spectrum) ** 2))
    if total == 0.0:
        return 0.0
    return math.sqrt(float(np.sum(np.abs(spectrum[outside]) ** 2)) / total)


def band_mask(grid: GridSpec, fraction: float = 0.8) -> np.ndarray:
    """Frequency lattice points inside the truncation band ``[-fraction*Xi, fraction*Xi]^n``."""
    return np.all(np.abs(grid.frequency_mesh()) <= fraction * grid.nyquist + 1e-12, axis=0)


def lattice_point(value: Sequence[float], step: float) -> Tuple[int, ...]:
    """Integer coordinates of ``value`` on a lattice with spacing ``step``; GridError off-lattice."""
    coords = []
    for v in value:
        m = round(v / step)
        if abs(m * step - v) > 1e-9 * max(1.0, abs(v)):
            raise GridError(f"{v} is not a multiple of the lattice step {step}")
        coords.append(int(m))
    return tuple(coords)
