"""
Alpha-modulation norms
======================

Discrete alpha-modulation norms of functions,

    ||f|| = ( sum_Q <xi_Q>^{s q} ||psi_Q(D) f||_p^q )^{1/q},

and the product norm on symbols with the outer exponents fixed to (inf, inf), (1, 1):

    ||sigma|| = sum_{Q, Q'} <xi_Q>^{s1} <xi_Q'>^{s2} sup_{x, xi} |psi_Q(D_x) psi_Q'(D_xi) sigma(x, xi)|.

Pieces and pairs are always accumulated in ascending id order.
"""

import logging
import math
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from alphamod.config import settings
from alphamod.core.grid import (
    band_mask,
    check_same_grid,
    eta_to_xi,
    forward_ft,
    frequency_leakage,
    frequency_to_space,
    lattice_lp,
    parse_exponent,
    space_to_frequency,
    xi_to_eta,
)
from alphamod.core.windows import DyadicWindows
from alphamod.exceptions import BandViolationError, UnsupportedParameterError
from alphamod.models.covering import Covering, CoveringPiece
from alphamod.models.grid import Domain, GridSpec, SampledFunction, SampledSymbol, SymbolDomain
from alphamod.models.spaces import NormBreakdown, NormContribution, NormParams

logger = logging.getLogger(__name__)

PIECE_CHUNK = 256
PAIR_FLOOR = 1e-14


def check_band(leakage: float, what: str, strict: Optional[bool] = None) -> None:
    """Warn (or raise in strict mode) when relative leakage exceeds the band tolerance."""
    strict = settings.STRICT_BAND if strict is None else strict
    if leakage <= settings.BAND_TOLERANCE:
        return
    message = f"{what}: relative spectral leakage {leakage:.3e} outside the band"
    if strict:
        raise BandViolationError(message)
    logger.warning(message)


def _combine(values: List[float], q: float) -> float:
    if not values:
        return 0.0
    if q == math.inf:
        return max(values)
    if q == 1.0:
        return math.fsum(values)
    return math.sqrt(math.fsum(v * v for v in values))


def _spectrum(f: SampledFunction) -> np.ndarray:
    return forward_ft(f).values if f.domain is Domain.SPACE else f.values


def _check_alpha(params: NormParams, covering: Covering) -> None:
    if params.alpha != covering.alpha:
        raise UnsupportedParameterError(
            f"norm parameters ask for alpha={params.alpha} but the covering has alpha={covering.alpha}"
        )


# ============================================================================
# FUNCTIONS
# ============================================================================

def band_component(f: SampledFunction, piece: CoveringPiece) -> SampledFunction:
    """psi_Q(D) f on the spatial lattice."""
    grid = check_same_grid(f.grid, piece.grid)
    axes = tuple(range(grid.dim))
    values = frequency_to_space(piece.window * _spectrum(f), grid, axes)
    return SampledFunction(grid, values, Domain.SPACE)


def function_leakage(f: SampledFunction, covering: Covering) -> float:
    grid = f.grid
    outside = ~band_mask(grid, covering.band_radius / grid.nyquist)
    return frequency_leakage(_spectrum(f), outside)


def alpha_modulation_norm(
    f: SampledFunction,
    params: NormParams,
    covering: Covering,
    strict: Optional[bool] = None,
) -> NormBreakdown:
    """Alpha-modulation norm of ``f`` with per-piece contributions.

    Args:
        f: Function in either domain
        params: Exponents p, q, smoothness s and alpha (must match the covering)
        covering: Covering built on the same grid
        strict: Raise ``BandViolationError`` on band leakage instead of warning

    Returns:
        NormBreakdown whose rows are (piece id, <xi_Q>^s, ||psi_Q(D) f||_p)
    """
    grid = check_same_grid(f.grid, covering.grid)
    _check_alpha(params, covering)
    spectrum = _spectrum(f)
    leakage = function_leakage(f, covering)
    check_band(leakage, "function", strict)

    cell = grid.spacing**grid.dim
    axes = tuple(range(1, grid.dim + 1))
    rows = []
    for start in range(0, len(covering), PIECE_CHUNK):
        chunk = covering.pieces[start:start + PIECE_CHUNK]
        spatial = frequency_to_space(covering.window_stack[start:start + PIECE_CHUNK] * spectrum, grid, axes)
        for piece, values in zip(chunk, spatial):
            rows.append(NormContribution(piece.id, None, piece.weight**params.s, lattice_lp(values, params.p, cell)))
    total = _combine([row.contribution for row in rows], params.q)
    return NormBreakdown("function", total, params, rows, leakage)


def reconstruct_function(f: SampledFunction, covering: Covering) -> SampledFunction:
    """sum_Q psi_Q(D) f; equals f when the spectrum lies in the band."""
    grid = check_same_grid(f.grid, covering.grid)
    total = covering.window_stack.sum(axis=0)
    return SampledFunction(grid, frequency_to_space(total * _spectrum(f), grid, tuple(range(grid.dim))))


def besov_norm(f: SampledFunction, p: Union[float, str], q: Union[float, str], s: float) -> float:
    """Dyadic Besov norm ( sum_j 2^{j s q} ||phi_j(D) f||_p^q )^{1/q} over the truncation band.

    Evaluates the Littlewood-Paley windows directly, independently of any ``Covering``.
    """
    p_value, q_value = parse_exponent(p), parse_exponent(q)
    grid = f.grid
    spectrum = _spectrum(f)
    windows = DyadicWindows(grid.dim)
    xi = grid.frequency_points()
    reach = 0.8 * grid.nyquist * math.sqrt(grid.dim)
    axes = tuple(range(grid.dim))
    cell = grid.spacing**grid.dim
    values = []
    level = 0
    while True:
        band = frequency_to_space(windows.evaluate(level, xi) * spectrum, grid, axes)
        values.append((2.0**level) ** s * lattice_lp(band, p_value, cell))
        if 2.0**level >= reach:
            break
        level += 1
    return _combine(values, q_value)


def exact_reciprocal(p: Union[float, str, Fraction]) -> Fraction:
    """1/p as an exact rational for p in [1, inf]; accepts "inf", "3/2", 1.5 or Fraction(3, 2)."""
    if isinstance(p, str):
        token = p.strip().lower()
        if token in ("inf", "infinity", "∞"):
            return Fraction(0)
        try:
            value = Fraction(token)
        except (ValueError, ZeroDivisionError) as e:
            raise UnsupportedParameterError(f"exponent must be a rational in [1, inf], got {p!r}") from e
    elif isinstance(p, float):
        if p == math.inf:
            return Fraction(0)
        if not math.isfinite(p):
            raise UnsupportedParameterError(f"exponent must be a rational in [1, inf], got {p!r}")
        value = Fraction(repr(p))
    else:
        value = Fraction(p)
    if value < 1:
        raise UnsupportedParameterError(f"exponent must lie in [1, inf], got {p!r}")
    return 1 / value


def nu_indices(p: Union[float, str, Fraction], q: Union[float, str, Fraction]) -> Tuple[Fraction, Fraction]:
    """Exponents of the sharp Besov/modulation embeddings, exact for rational p, q in [1, inf].

    nu1 = max{0, 1/q - min(1/p, 1/p')}, nu2 = min{0, 1/q - max(1/p, 1/p')}.
    """
    inv_p, inv_q = exact_reciprocal(p), exact_reciprocal(q)
    inv_conj = 1 - inv_p
    nu1 = max(Fraction(0), inv_q - min(inv_p, inv_conj))
    nu2 = min(Fraction(0), inv_q - max(inv_p, inv_conj))
    return nu1, nu2


# ============================================================================
# SYMBOLS
# ============================================================================

def symbol_spectrum(sigma: SampledSymbol) -> np.ndarray:
    """F_1 F_2 sigma on the (y, eta) lattice."""
    sigma.require(SymbolDomain.X_XI)
    n = sigma.grid.dim
    spectrum = space_to_frequency(sigma.values, sigma.grid, tuple(range(n)))
    return xi_to_eta(spectrum, sigma.grid, tuple(range(n, 2 * n)))


def _symbol_leakage(spectrum: np.ndarray, covering: Covering) -> float:
    grid = covering.grid
    n = grid.dim
    y_band = band_mask(grid, covering.band_radius / grid.nyquist)
    inside = y_band.reshape(grid.shape + (1,) * n) & covering.dual_band_mask.reshape((1,) * n + grid.shape)
    return frequency_leakage(spectrum, ~inside)


def _back_to_symbol(filtered: np.ndarray, grid: GridSpec) -> np.ndarray:
    n = grid.dim
    spatial = frequency_to_space(filtered, grid, tuple(range(n)))
    return eta_to_xi(spatial, grid, tuple(range(n, 2 * n)))


def product_symbol_norm(
    sigma: SampledSymbol,
    params: NormParams,
    covering: Covering,
    strict: Optional[bool] = None,
) -> NormBreakdown:
    """Product alpha-modulation norm of a symbol with per-pair contributions.

    Pairs whose filtered spectrum is below ``1e-14`` of the spectrum maximum
    are skipped; the remaining pairs are visited in (Q, Q') id order.
    """
    grid = check_same_grid(sigma.grid, covering.grid)
    _check_alpha(params, covering)
    n = grid.dim
    spectrum = symbol_spectrum(sigma)
    leakage = _symbol_leakage(spectrum, covering)
    check_band(leakage, "symbol", strict)

    size = grid.size
    magnitude = np.abs(spectrum).reshape(size, size)
    scale = float(magnitude.max()) if magnitude.size else 0.0
    if scale == 0.0:
        return NormBreakdown("symbol", 0.0, params, [], leakage)

    windows = np.abs(covering.window_stack.reshape(len(covering), size))
    dual = covering.dual_window_stack.reshape(len(covering), size)
    y_activity = (windows * magnitude.max(axis=1)).max(axis=1)
    threshold = PAIR_FLOOR * scale
    x_axes = tuple(range(n))
    xi_axes = tuple(range(n, 2 * n))

    rows = []
    for q_id in np.flatnonzero(y_activity > threshold):
        piece = covering.pieces[q_id]
        eta_profile = (windows[q_id][:, None] * magnitude).max(axis=0)
        eta_activity = (np.abs(dual) * eta_profile).max(axis=1)
        active = np.flatnonzero(eta_activity > threshold)
        if active.size == 0:
            continue
        y_filtered = piece.window.reshape(grid.shape + (1,) * n) * spectrum
        x_eta = frequency_to_space(y_filtered, grid, x_axes)
        for q_prime in active:
            dual_window = dual[q_prime].reshape((1,) * n + grid.shape)
            band = eta_to_xi(dual_window * x_eta, grid, xi_axes)
            weight = piece.weight**params.s1 * covering.pieces[q_prime].weight**params.s2
            rows.append(NormContribution(int(q_id), int(q_prime), weight, float(np.abs(band).max())))
    total = math.fsum(row.contribution for row in rows)
    return NormBreakdown("symbol", total, params, rows, leakage)


def reconstruct_symbol(sigma: SampledSymbol, covering: Covering) -> SampledSymbol:
    """sum_{Q, Q'} psi_Q(D_x) psi_Q'(D_xi) sigma; equals sigma when its spectrum lies in the band."""
    grid = check_same_grid(sigma.grid, covering.grid)
    n = grid.dim
    y_total = covering.window_stack.sum(axis=0).reshape(grid.shape + (1,) * n)
    eta_total = covering.dual_window_stack.sum(axis=0).reshape((1,) * n + grid.shape)
    values = _back_to_symbol(y_total * eta_total * symbol_spectrum(sigma), grid)
    return SampledSymbol(grid, values, SymbolDomain.X_XI)
