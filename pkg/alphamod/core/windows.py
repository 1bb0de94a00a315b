"""
Window profiles
===============

Smooth compactly supported profiles and the window families built from them:

* ``standard_bump``       exp(1 - 1/(1 - t^2)) on |t| < 1, value 1 at the origin
* ``smooth_step``         1 on |t| <= 1, 0 on |t| >= 2 (radial dyadic cutoff)
* ``edge_taper``          tensor cutoff from the band edge down to zero at the lattice edge
* ``LatticeWindows``      translates of a 1-periodised bump (alpha = 0)
* ``DyadicWindows``       Littlewood-Paley annuli (alpha = 1)
* ``BallWindows``         normalised bumps on balls of radius ~ |c_k|^alpha (0 < alpha < 1)
* ``RegularizingWindow``  compact, phi(0) = 1, int phi = 1 (Lipschitz regularisation)
* ``MollifierWindows``    band-limited cutoff and compact unit-mass kernel (symbol mollification)

Windows evaluate at arbitrary points of shape ``(..., dim)``, so the same piece
can be sampled on the xi lattice and on the eta lattice.
"""

import logging
import math
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import j0

logger = logging.getLogger(__name__)

QUADRATURE_NODES = 160


# ============================================================================
# PROFILES
# ============================================================================

def standard_bump(t: np.ndarray) -> np.ndarray:
    """exp(1 - 1/(1 - t^2)) for |t| < 1, else 0."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    s = t[inside] ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s))
    return out


def bump_derivative(t: np.ndarray) -> np.ndarray:
    """d/dt of ``standard_bump``."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    s = 1.0 - ti**2
    out[inside] = np.exp(1.0 - 1.0 / s) * (-2.0 * ti / s**2)
    return out


def _smooth_edge(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t: np.ndarray) -> np.ndarray:
    """Smooth radial cutoff: 1 for t <= 1, 0 for t >= 2."""
    t = np.asarray(t, dtype=np.float64)
    a = _smooth_edge(2.0 - t)
    b = _smooth_edge(t - 1.0)
    return a / (a + b)


def edge_taper(points: np.ndarray, inner: float, outer: float) -> np.ndarray:
    """Tensor cutoff equal to 1 on ``|xi_i| <= inner`` for every axis and 0 from ``|xi_i| >= outer``."""
    points = np.asarray(points, dtype=np.float64)
    excess = np.maximum(np.abs(points) - inner, 0.0) / (outer - inner)
    return np.prod(smooth_step(1.0 + excess), axis=-1)


def lattice_profile(t: np.ndarray) -> np.ndarray:
    """1-D profile b(t) / sum_m b(t - m); its integer translates sum to one."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    inside = np.abs(t) <= 1.0
    ti = t[inside]
    denom = standard_bump(ti) + standard_bump(ti - 1.0) + standard_bump(ti + 1.0)
    out[inside] = standard_bump(ti) / denom
    return out


@lru_cache(maxsize=8)
def gauss_legendre(count: int = QUADRATURE_NODES) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(count)
    return nodes, weights


def bump_integral(dim: int) -> float:
    """Integral of the radial standard bump over R^dim."""
    nodes, weights = gauss_legendre()
    if dim == 1:
        return float(np.sum(weights * standard_bump(nodes)))
    r = 0.5 * (nodes + 1.0)
    return float(2 * math.pi * 0.5 * np.sum(weights * standard_bump(r) * r))


def bump_fourier_1d(omega: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """int b(t / radius) e^{-i omega t} dt by Gauss-Legendre (real, the bump is even)."""
    nodes, weights = gauss_legendre()
    t = radius * nodes
    omega = np.asarray(omega, dtype=np.float64)
    kernel = np.cos(np.multiply.outer(omega, t))
    return radius * kernel @ (weights * standard_bump(nodes))


def radial_bump_fourier(omega_norm: np.ndarray, dim: int, radius: float = 1.0) -> np.ndarray:
    """Fourier transform of B(|x| / radius) evaluated at frequencies of norm ``omega_norm``."""
    if dim == 1:
        return bump_fourier_1d(omega_norm, radius)
    nodes, weights = gauss_legendre()
    r = 0.5 * (nodes + 1.0)
    w = 0.5 * weights * standard_bump(r) * r
    omega_norm = np.asarray(omega_norm, dtype=np.float64)
    kernel = j0(np.multiply.outer(omega_norm, radius * r))
    return 2 * math.pi * radius**2 * (kernel @ w)


# ============================================================================
# COVERING WINDOW FAMILIES
# ============================================================================

class LatticeWindows:
    """alpha = 0: psi_k(xi) = prod_i psi1(xi_i - k_i), pieces are the cubes k + [-1, 1]^n."""

    def __init__(self, dim: int):
        self.dim = dim

    def evaluate(self, center: Sequence[float], points: np.ndarray) -> np.ndarray:
        offset = np.asarray(points, dtype=np.float64) - np.asarray(center, dtype=np.float64)
        out = np.ones(offset.shape[:-1])
        for axis in range(self.dim):
            out = out * lattice_profile(offset[..., axis])
        return out


class DyadicWindows:
    """alpha = 1: phi_0 = chi, phi_j(xi) = chi(2^-j xi) - chi(2^(1-j) xi)."""

    def __init__(self, dim: int):
        self.dim = dim

    def evaluate(self, level: int, points: np.ndarray) -> np.ndarray:
        radius = np.linalg.norm(np.asarray(points, dtype=np.float64), axis=-1)
        if level == 0:
            return smooth_step(radius)
        return smooth_step(radius / 2.0**level) - smooth_step(radius / 2.0 ** (level - 1))


class BallWindows:
    """0 < alpha < 1: psi_k = g_k / sum_l g_l with g_k(xi) = B(|c_k|^-alpha |xi - c_k| / r).

    Args:
        centers: Array ``(count, dim)`` of the ball centers c_k
        alpha: Covering parameter
        scale: Bump radius r in the normalised variable
    """

    def __init__(self, centers: np.ndarray, alpha: float, scale: float):
        self.centers = np.asarray(centers, dtype=np.float64)
        self.alpha = alpha
        self.scale = scale
        self.radii = scale * np.linalg.norm(self.centers, axis=1) ** alpha

    def bump(self, index: int, points: np.ndarray) -> np.ndarray:
        offset = np.asarray(points, dtype=np.float64) - self.centers[index]
        return standard_bump(np.linalg.norm(offset, axis=-1) / self.radii[index])

    def denominator(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        total = np.zeros(points.shape[:-1])
        for index in range(len(self.centers)):
            total += self.bump(index, points)
        return total

    def evaluate(self, index: int, points: np.ndarray, denominator: Optional[np.ndarray] = None) -> np.ndarray:
        numerator = self.bump(index, points)
        if denominator is None:
            denominator = self.denominator(points)
        out = np.zeros_like(numerator)
        positive = denominator > 0
        out[positive] = numerator[positive] / denominator[positive]
        return out


# ============================================================================
# REGULARISATION AND MOLLIFICATION WINDOWS
# ============================================================================

class RegularizingWindow:
    """Radial phi(x) = B(|x| / rho) with rho chosen so that int phi = 1; phi(0) = 1, supp phi in the unit ball."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rho = (1.0 / bump_integral(dim)) ** (1.0 / dim)

    def value(self, points: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(np.asarray(points, dtype=np.float64), axis=-1)
        return standard_bump(r / self.rho)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Gradient samples with the vector component last, shape ``(..., dim)``."""
        points = np.asarray(points, dtype=np.float64)
        r = np.linalg.norm(points, axis=-1)
        radial = bump_derivative(r / self.rho) / self.rho
        safe = np.where(r > 0, r, 1.0)
        return points * (radial / safe)[..., None]

    def fourier(self, omega: np.ndarray) -> np.ndarray:
        """phi^(omega) for frequencies of shape ``(..., dim)``."""
        omega_norm = np.linalg.norm(np.asarray(omega, dtype=np.float64), axis=-1)
        return radial_bump_fourier(omega_norm, self.dim, self.rho)

    def constants(self) -> Dict[str, float]:
        """The constants entering the regularisation bound.

        C1 = sup (1 + |x|) |grad phi(x)|, C2 = int (1 + |y|) |phi(y)| dy,
        C = C1 * C2 + ||grad phi||_inf + ||phi||_1 ||phi||_inf.
        """
        r = np.linspace(0.0, self.rho, 20001)
        grad = np.abs(bump_derivative(r / self.rho)) / self.rho
        c1 = float(np.max((1.0 + r) * grad))
        nodes, weights = gauss_legendre()
        if self.dim == 1:
            t = self.rho * nodes
            c2 = float(self.rho * np.sum(weights * (1.0 + np.abs(t)) * standard_bump(nodes)))
            mass = float(self.rho * np.sum(weights * standard_bump(nodes)))
        else:
            s = 0.5 * (nodes + 1.0)
            radial = 0.5 * weights * standard_bump(s) * s
            c2 = float(2 * math.pi * self.rho**2 * np.sum(radial * (1.0 + self.rho * s)))
            mass = float(2 * math.pi * self.rho**2 * np.sum(radial))
        grad_sup = float(grad.max())
        return {
            "C1": c1,
            "C2": c2,
            "grad_sup": grad_sup,
            "l1": mass,
            "sup": 1.0,
            "C": c1 * c2 + grad_sup + mass * 1.0,
        }


class MollifierWindows:
    """Pair used to mollify a symbol: sigma_eps = Phi_eps (Psi_eps * sigma).

    * cutoff phi: phi(0) = 1 and supp phi^ in the unit ball (tensor product of
      1-D inverse transforms of bumps of radius 1/sqrt(n));
    * kernel psi: nonnegative, int psi = 1, compact (normalised tensor bump).
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.cutoff_radius = 1.0 / math.sqrt(dim)
        self._cutoff_norm = float(bump_fourier_1d(np.zeros(1), self.cutoff_radius)[0])
        self._kernel_mass = float(bump_fourier_1d(np.zeros(1))[0])

    def cutoff(self, points: np.ndarray) -> np.ndarray:
        """phi(x) = prod_i (int b(w / r) e^{i w x_i} dw) / (int b(w / r) dw)."""
        points = np.asarray(points, dtype=np.float64)
        out = np.ones(points.shape[:-1])
        for axis in range(self.dim):
            out = out * bump_fourier_1d(points[..., axis], self.cutoff_radius) / self._cutoff_norm
        return out

    def kernel_fourier(self, omega: np.ndarray) -> np.ndarray:
        """psi^(omega) = prod_i b^(omega_i) / int b."""
        omega = np.asarray(omega, dtype=np.float64)
        out = np.ones(omega.shape[:-1])
        for axis in range(self.dim):
            out = out * bump_fourier_1d(omega[..., axis]) / self._kernel_mass
        return out

    def kernel_mass(self) -> float:
        """int psi, computed by quadrature independently of the normalisation constant."""
        nodes, weights = gauss_legendre(2 * QUADRATURE_NODES)
        one_axis = float(np.sum(weights * standard_bump(nodes))) / self._kernel_mass
        return one_axis**self.dim
