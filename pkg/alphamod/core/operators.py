"""
Pseudo-differential operators
=============================

Kohn-Nirenberg quantisation on the lattice,

    sigma(X, D) f(x_j) = L^{-n} sum_k e^{i x_j.xi_k} sigma(x_j, xi_k) f^(xi_k),

its adjoint, a power-iteration norm estimate with a Lanczos fallback, commutators with Lipschitz
multipliers (direct and in the twisted-symbol form), and the smoothing
operations used by the commutator estimates: symbol mollification,
Lipschitz regularisation and the phi/chi pair with unit pairing.
"""

import logging
import math
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from alphamod.config import settings
from alphamod.core.covering import window_derivative_l1
from alphamod.core.grid import (
    band_mask,
    check_same_grid,
    eta_to_xi,
    forward_ft,
    frequency_leakage,
    frequency_to_space,
    lattice_lp,
    space_to_frequency,
    spectral_gradient,
    xi_to_eta,
)
from alphamod.core.spaces import check_band, product_symbol_norm, symbol_spectrum
from alphamod.core.windows import MollifierWindows, RegularizingWindow, standard_bump
from alphamod.exceptions import GridError, UnsupportedParameterError
from alphamod.models.covering import Covering
from alphamod.models.grid import Domain, GridSpec, SampledFunction, SampledSymbol, SymbolDomain
from alphamod.models.operators import (
    Lemma31Pair,
    LipschitzFunction,
    PowerIterationResult,
    RegularizationResult,
    epsilon_of,
)
from alphamod.models.spaces import NormParams

logger = logging.getLogger(__name__)

TWIST_FLOOR = 1e-13


# ============================================================================
# QUANTISATION
# ============================================================================

def check_dense_size(grid: GridSpec) -> None:
    """Dense operator routines hold an N^n x N^n kernel; refuse grids above the configured ceiling."""
    limit = settings.MAX_POINTS_1D if grid.dim == 1 else settings.MAX_POINTS_2D
    if grid.points_per_axis > limit:
        raise UnsupportedParameterError(
            f"N={grid.points_per_axis} exceeds the dense-operator limit {limit} for dim={grid.dim}"
        )


@lru_cache(maxsize=8)
def fourier_kernel(grid: GridSpec) -> np.ndarray:
    """E[j, k] = exp(i x_j . xi_k), flattened over the lattice."""
    x = grid.spatial_points().reshape(-1, grid.dim)
    xi = grid.frequency_points().reshape(-1, grid.dim)
    return np.exp(1j * (x @ xi.T))


def _spectrum(f: SampledFunction) -> np.ndarray:
    return forward_ft(f).values if f.domain is Domain.SPACE else f.values


class QuantizedOperator:
    """Dense lattice matrix of sigma(X, D) acting on frequency samples.

    Args:
        sigma: Symbol in the (x, xi) domain
    """

    def __init__(self, sigma: SampledSymbol):
        sigma.require(SymbolDomain.X_XI)
        check_dense_size(sigma.grid)
        self.grid = sigma.grid
        size = self.grid.size
        self.kernel = sigma.values.reshape(size, size) * fourier_kernel(self.grid) / self.grid.period**self.grid.dim

    def apply_spectrum(self, spectrum: np.ndarray) -> np.ndarray:
        return (self.kernel @ spectrum.ravel()).reshape(self.grid.shape)

    def apply(self, f: SampledFunction) -> SampledFunction:
        check_same_grid(f.grid, self.grid)
        return SampledFunction(self.grid, self.apply_spectrum(_spectrum(f)), Domain.SPACE)

    def adjoint(self, g: SampledFunction) -> SampledFunction:
        """Adjoint with respect to the lattice L^2 inner product."""
        check_same_grid(g.grid, self.grid)
        g.require(Domain.SPACE)
        grid = self.grid
        h = (self.kernel.conj().T @ g.values.ravel()).reshape(grid.shape)
        factor = (grid.period**2 / grid.points_per_axis) ** grid.dim
        values = factor * frequency_to_space(h, grid, tuple(range(grid.dim)))
        return SampledFunction(grid, values, Domain.SPACE)


def quantize_apply(sigma: SampledSymbol, f: SampledFunction) -> SampledFunction:
    """sigma(X, D) f on the spatial lattice."""
    check_same_grid(sigma.grid, f.grid)
    return QuantizedOperator(sigma).apply(f)


def adjoint_apply(sigma: SampledSymbol, g: SampledFunction) -> SampledFunction:
    """sigma(X, D)^* g, so that <sigma(X, D) f, g> = <f, sigma(X, D)^* g> on the lattice."""
    check_same_grid(sigma.grid, g.grid)
    return QuantizedOperator(sigma).adjoint(g)


def _l2(values: np.ndarray) -> float:
    return float(np.linalg.norm(values.ravel()))


def _lanczos_refine(operator: QuantizedOperator, v: np.ndarray, tol: float, max_iter: int) -> Tuple[float, int, bool]:
    """Largest eigenvalue of T^* T by implicitly restarted Lanczos, started from the power iterate."""
    grid = operator.grid
    applied = 0

    def gram(flat: np.ndarray) -> np.ndarray:
        nonlocal applied
        applied += 1
        tv = operator.apply(SampledFunction(grid, flat.reshape(grid.shape), Domain.SPACE))
        return operator.adjoint(tv).values.ravel()

    normal = LinearOperator((grid.size, grid.size), matvec=gram, dtype=np.complex128)
    try:
        eigenvalues = eigsh(normal, k=1, which="LM", v0=v.ravel(), tol=tol, maxiter=max_iter, return_eigenvectors=False)
        return float(eigenvalues[0].real), applied, True
    except ArpackNoConvergence as e:
        found = np.asarray(e.eigenvalues)
        return (float(found.real.max()) if found.size else math.nan), applied, False


def operator_norm_estimate(
    sigma: SampledSymbol,
    tol: float = 1e-6,
    max_iter: int = 500,
    seed: int = 0,
) -> PowerIterationResult:
    """Estimate ||sigma(X, D)||_{L^2 -> L^2} by power iteration on T^* T.

    With v a unit iterate and lambda = ||T v||^2 its Rayleigh quotient, the
    iteration stops once the eigen-residual ||T^* T v - lambda v|| falls below
    ``tol * lambda``. If ``max_iter`` passes first (clustered top of the
    spectrum), the last iterate seeds a Lanczos refinement of the same
    eigenvalue; a warning is logged only if that also fails to converge.
    """
    operator = QuantizedOperator(sigma)
    grid = operator.grid
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    v /= _l2(v)

    rayleigh = 0.0
    for iteration in range(1, max_iter + 1):
        tv = operator.apply(SampledFunction(grid, v, Domain.SPACE))
        rayleigh = _l2(tv.values) ** 2
        if rayleigh == 0.0:
            return PowerIterationResult(0.0, iteration, True)
        w = operator.adjoint(tv).values
        if _l2(w - rayleigh * v) <= tol * rayleigh:
            logger.debug(f"Power iteration converged after {iteration} iterations: {math.sqrt(rayleigh):.12g}")
            return PowerIterationResult(math.sqrt(rayleigh), iteration, True)
        v = w / _l2(w)

    logger.info(f"Power iteration stalled after {max_iter} iterations, refining with Lanczos")
    eigenvalue, applied, converged = _lanczos_refine(operator, v, tol, max_iter)
    if not math.isfinite(eigenvalue):
        eigenvalue, converged = rayleigh, False
    if not converged:
        logger.warning(f"Norm estimate did not converge (last estimate {math.sqrt(max(eigenvalue, 0.0)):.6g})")
    return PowerIterationResult(math.sqrt(max(eigenvalue, rayleigh)), max_iter + applied, converged)


# ============================================================================
# COMMUTATORS
# ============================================================================

def make_lipschitz(f: SampledFunction) -> LipschitzFunction:
    """Wrap real samples as a ``LipschitzFunction`` with a spectral gradient."""
    f.require(Domain.SPACE)
    return LipschitzFunction(f.grid, f.values, spectral_gradient(f))


def _product_leakage(a: LipschitzFunction, f: SampledFunction) -> float:
    product = SampledFunction(a.grid, a.values * f.values, Domain.SPACE)
    outside = ~band_mask(a.grid)
    return frequency_leakage(forward_ft(product).values, outside)


def commutator_apply(
    sigma: SampledSymbol,
    a: LipschitzFunction,
    f: SampledFunction,
    strict: Optional[bool] = None,
) -> SampledFunction:
    """[sigma(X, D), a] f = sigma(X, D)(a f) - a sigma(X, D) f."""
    grid = check_same_grid(sigma.grid, a.grid, f.grid)
    f.require(Domain.SPACE)
    check_band(_product_leakage(a, f), "commutator product a*f", strict)
    operator = QuantizedOperator(sigma)
    af = SampledFunction(grid, a.values * f.values, Domain.SPACE)
    values = operator.apply(af).values - a.values * operator.apply(f).values
    return SampledFunction(grid, values, Domain.SPACE)


def _shift_xi(values: np.ndarray, shift: Tuple[int, ...], dim: int) -> np.ndarray:
    """out[..., k] = values[..., k + shift] on the xi axes, zero where k + shift leaves the lattice."""
    out = np.zeros_like(values)
    target = [slice(None)] * values.ndim
    source = [slice(None)] * values.ndim
    for axis, m in enumerate(shift):
        position = dim + axis
        size = values.shape[position]
        if m >= 0:
            target[position] = slice(0, size - m)
            source[position] = slice(m, size)
        else:
            target[position] = slice(-m, size)
            source[position] = slice(0, size + m)
    out[tuple(target)] = values[tuple(source)]
    return out


def commutator_twisted(
    sigma: SampledSymbol,
    a: LipschitzFunction,
    f: SampledFunction,
    strict: Optional[bool] = None,
) -> SampledFunction:
    """Commutator through the twisted symbol.

    ``[T, a] f(x) = L^{-n} sum_eta a^(eta) e^{i x.eta} (sigma(x, . + eta) - sigma(x, .))(X, D) f``,
    the lattice form of ``C_n int int e^{i x.(eta+xi)} a^(eta) (sigma(x, xi+eta) - sigma(x, xi)) f^(xi)``
    with ``C_n = (2 pi)^{-2n}``.
    """
    grid = check_same_grid(sigma.grid, a.grid, f.grid)
    sigma.require(SymbolDomain.X_XI)
    f.require(Domain.SPACE)
    check_band(_product_leakage(a, f), "commutator product a*f", strict)
    check_dense_size(grid)

    a_hat = space_to_frequency(a.values.astype(np.complex128), grid, tuple(range(grid.dim)))
    spectrum = _spectrum(f).ravel()
    kernel = fourier_kernel(grid) / grid.period**grid.dim
    x = grid.spatial_points()
    xi = grid.frequency_points()
    size = grid.size
    cutoff = TWIST_FLOOR * float(np.abs(a_hat).max())
    origin = grid.points_per_axis // 2

    total = np.zeros(grid.shape, dtype=np.complex128)
    for index in zip(*np.nonzero(np.abs(a_hat) > cutoff)):
        shift = tuple(int(i) - origin for i in index)
        eta = xi[index]
        difference = _shift_xi(sigma.values, shift, grid.dim) - sigma.values
        rows = ((difference.reshape(size, size) * kernel) @ spectrum).reshape(grid.shape)
        total += a_hat[index] / grid.period**grid.dim * np.exp(1j * (x @ eta)) * rows
    return SampledFunction(grid, total, Domain.SPACE)


# ============================================================================
# SMOOTHING
# ============================================================================

def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise UnsupportedParameterError(f"epsilon must lie in (0, 1), got {epsilon}")


def mollify_cutoff(sigma: SampledSymbol, epsilon: float) -> SampledSymbol:
    """Phi_eps sigma = phi(eps x) phi(eps xi) sigma(x, xi)."""
    _check_epsilon(epsilon)
    sigma.require(SymbolDomain.X_XI)
    grid = sigma.grid
    windows = MollifierWindows(grid.dim)
    n = grid.dim
    x_part = windows.cutoff(epsilon * grid.spatial_points()).reshape(grid.shape + (1,) * n)
    xi_part = windows.cutoff(epsilon * grid.frequency_points()).reshape((1,) * n + grid.shape)
    return SampledSymbol(grid, sigma.values * x_part * xi_part, SymbolDomain.X_XI)


def mollify_convolve(sigma: SampledSymbol, epsilon: float) -> SampledSymbol:
    """Psi_eps * sigma with Psi_eps(x, xi) = eps^{-2n} psi(x / eps) psi(xi / eps), applied in Fourier."""
    _check_epsilon(epsilon)
    grid = sigma.grid
    windows = MollifierWindows(grid.dim)
    n = grid.dim
    y_part = windows.kernel_fourier(epsilon * grid.frequency_points()).reshape(grid.shape + (1,) * n)
    eta_part = windows.kernel_fourier(epsilon * grid.spatial_points()).reshape((1,) * n + grid.shape)
    filtered = symbol_spectrum(sigma) * y_part * eta_part
    spatial = frequency_to_space(filtered, grid, tuple(range(n)))
    return SampledSymbol(grid, eta_to_xi(spatial, grid, tuple(range(n, 2 * n))), SymbolDomain.X_XI)


def mollify_symbol(sigma: SampledSymbol, epsilon: float) -> SampledSymbol:
    """sigma_eps = Phi_eps (Psi_eps * sigma); tends to sigma locally uniformly as eps -> 0."""
    return mollify_cutoff(mollify_convolve(sigma, epsilon), epsilon)


def phase_space_window(grid: GridSpec, radius: float) -> np.ndarray:
    """Mask of the (x, xi) lattice points with every coordinate of x and xi at most ``radius`` in size."""
    n = grid.dim
    x_in = np.abs(grid.spatial_points()).max(axis=-1) <= radius
    xi_in = np.abs(grid.frequency_points()).max(axis=-1) <= radius
    return x_in.reshape(grid.shape + (1,) * n) & xi_in.reshape((1,) * n + grid.shape)


def mollification_deviation(sigma: SampledSymbol, mollified: SampledSymbol, radius: float = 2.0) -> Tuple[float, float]:
    """(max |sigma_eps - sigma|, max |sigma|) over ``phase_space_window(grid, radius)``."""
    grid = check_same_grid(sigma.grid, mollified.grid)
    window = phase_space_window(grid, radius)
    deviation = float(np.abs(mollified.values - sigma.values)[window].max())
    scale = float(np.abs(sigma.values)[window].max())
    return deviation, scale


def regularize_lipschitz(a: LipschitzFunction, epsilon: float) -> LipschitzFunction:
    """a_eps(x) = phi(eps x) (phi_eps * a)(x), with the gradient from the product rule.

    Raises:
        UnsupportedParameterError: Unless 0 < epsilon < epsilon(a)
    """
    _check_epsilon(epsilon)
    limit = epsilon_of(a)
    if epsilon >= limit:
        raise UnsupportedParameterError(f"epsilon {epsilon} must be below epsilon(a) = {limit:.6g}")
    grid = a.grid
    window = RegularizingWindow(grid.dim)
    axes = tuple(range(grid.dim))
    multiplier = window.fourier(epsilon * grid.frequency_points())

    def smooth(values: np.ndarray) -> np.ndarray:
        spectrum = space_to_frequency(values.astype(np.complex128), grid, axes)
        return frequency_to_space(multiplier * spectrum, grid, axes).real

    x = grid.spatial_points()
    cutoff = window.value(epsilon * x)
    cutoff_grad = epsilon * np.moveaxis(window.gradient(epsilon * x), -1, 0)
    convolved = smooth(a.values)
    values = cutoff * convolved
    gradient = np.stack(
        [cutoff_grad[i] * convolved + cutoff * smooth(a.gradient[i]) for i in range(grid.dim)]
    )
    return LipschitzFunction(grid, values, gradient)


def regularization_constant(dim: int) -> Dict[str, float]:
    """Explicit constant C with ||grad a_eps||_inf <= C ||grad a||_inf, and its ingredients."""
    return RegularizingWindow(dim).constants()


def regularization_report(a: LipschitzFunction, epsilon: float) -> RegularizationResult:
    regularized = regularize_lipschitz(a, epsilon)
    constants = regularization_constant(a.grid.dim)
    ratio = regularized.grad_sup / a.grad_sup if a.grad_sup > 0 else 0.0
    return RegularizationResult(epsilon, regularized, ratio, constants["C"], constants)


# ============================================================================
# PHI / CHI PAIR AND BAND FILTERS
# ============================================================================

def make_lemma31_pair(grid: GridSpec) -> Lemma31Pair:
    """phi (compact in xi) and chi (xi-transform supported in the unit ball) with (2 pi / L)^n sum phi chi = 1.

    Raises:
        GridError: If either lattice has fewer than 8 points across the unit ball
    """
    across_xi = 2.0 / grid.frequency_step
    across_eta = 2.0 / grid.spacing
    if across_xi < 8 or across_eta < 8:
        raise GridError(
            f"unit ball resolved by {across_xi:.1f} xi points and {across_eta:.1f} eta points; need at least 8 each"
        )
    axes = tuple(range(grid.dim))
    phi = standard_bump(np.linalg.norm(grid.frequency_points(), axis=-1))
    eta_norm = np.linalg.norm(grid.spatial_points(), axis=-1)
    chi = eta_to_xi(standard_bump(eta_norm).astype(np.complex128), grid, axes).real
    cell = grid.frequency_step**grid.dim
    raw = float(cell * np.sum(phi * chi))
    if raw <= 0.0:
        raise GridError(f"phi/chi pairing is not positive ({raw:.3g}) on this grid")
    scale = 1.0 / math.sqrt(raw)
    phi, chi = scale * phi, scale * chi
    pairing = float(cell * np.sum(phi * chi))
    transformed = np.abs(xi_to_eta(chi.astype(np.complex128), grid, axes))
    outside = eta_norm >= 1.0
    leakage = float(transformed[outside].max() / transformed.max())
    return Lemma31Pair(grid, phi, chi, pairing, leakage, scale)


def band_filter_sup_bound(sigma: SampledSymbol, covering: Covering) -> pd.DataFrame:
    """Per active pair: sup |psi_Q(D_x) psi_Q'(D_xi) sigma| against ||F^-1 psi_Q||_1 ||F^-1 psi_Q'||_1 ||sigma||_inf."""
    grid = check_same_grid(sigma.grid, covering.grid)
    breakdown = product_symbol_norm(sigma, NormParams(alpha=covering.alpha), covering, strict=False)
    x_l1 = window_derivative_l1(covering, (0,) * grid.dim)["l1_norm"].to_numpy()
    axes = tuple(range(1, grid.dim + 1))
    xi_kernels = eta_to_xi(covering.dual_window_stack.astype(np.complex128), grid, axes)
    cell = grid.frequency_step**grid.dim
    xi_l1 = np.array([lattice_lp(kernel, 1.0, cell) for kernel in xi_kernels])
    sup = float(np.abs(sigma.values).max())

    rows = []
    for row in breakdown.rows:
        bound = x_l1[row.piece_id_x] * xi_l1[row.piece_id_xi] * sup
        rows.append(
            {
                "piece_id_x": row.piece_id_x,
                "piece_id_xi": row.piece_id_xi,
                "band_sup": row.band_value,
                "bound": bound,
                "ratio": row.band_value / bound if bound > 0 else 0.0,
            }
        )
    return pd.DataFrame(rows, columns=["piece_id_x", "piece_id_xi", "band_sup", "bound", "ratio"])
