"""
Operator value objects
======================
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator

import numpy as np

from alphamod.exceptions import DomainTagError
from alphamod.models.grid import Domain, GridSpec, SampledFunction


@dataclass(frozen=True)
class LipschitzFunction:
    """Real Lipschitz function with gradient samples.

    Args:
        grid: Sampling grid
        values: Real samples, shape ``grid.shape``
        gradient: Gradient samples, shape ``(dim, *grid.shape)``
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    gradient: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            scale = max(float(np.abs(values).max()), 1.0)
            if float(np.abs(values.imag).max()) > 1e-10 * scale:
                raise DomainTagError("Lipschitz functions must be real valued")
            values = values.real
        values = np.array(values, dtype=np.float64)
        gradient = np.array(np.real(self.gradient), dtype=np.float64)
        if values.shape != self.grid.shape or gradient.shape != (self.grid.dim,) + self.grid.shape:
            raise DomainTagError("Lipschitz samples do not match the grid")
        values.flags.writeable = False
        gradient.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "gradient", gradient)

    @property
    def grad_sup(self) -> float:
        """max_j |grad a(x_j)| (Euclidean length)."""
        return float(np.sqrt(np.sum(self.gradient**2, axis=0)).max())

    @property
    def lipschitz_constant(self) -> float:
        return self.grad_sup

    def value_at_origin(self) -> float:
        index = (self.grid.points_per_axis // 2,) * self.grid.dim
        return float(self.values[index])

    def as_function(self) -> SampledFunction:
        return SampledFunction(self.grid, self.values, Domain.SPACE)


@dataclass(frozen=True)
class PowerIterationResult:
    """Outcome of the power iteration on sigma(X, D)^* sigma(X, D)."""

    norm: float
    iterations: int
    converged: bool

    def __iter__(self) -> Iterator[float]:
        return iter((self.norm, self.iterations))


@dataclass(frozen=True)
class RegularizationResult:
    """a_eps together with the quantities entering the regularisation bound."""

    epsilon: float
    regularized: LipschitzFunction
    grad_ratio: float
    constant: float
    constants: Dict[str, float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "grad_sup": self.regularized.grad_sup,
            "grad_ratio": self.grad_ratio,
            "constant": self.constant,
            **{f"window_{key}": value for key, value in self.constants.items()},
        }


@dataclass(frozen=True)
class Lemma31Pair:
    """phi on the xi lattice and chi (xi-transform supported in the unit ball) with int phi chi = 1."""

    grid: GridSpec
    phi: np.ndarray = field(repr=False)
    chi: np.ndarray = field(repr=False)
    pairing: float
    leakage: float
    scale: float

    def summary(self) -> Dict[str, Any]:
        return {
            "grid": self.grid.to_dict(),
            "pairing": self.pairing,
            "pairing_error": abs(self.pairing - 1.0),
            "leakage": self.leakage,
            "scale": self.scale,
        }


def epsilon_of(a: LipschitzFunction) -> float:
    """epsilon(a) = min(||grad a||_inf / |a(0)|, 1), and 1 when a(0) = 0."""
    origin = abs(a.value_at_origin())
    if origin == 0.0:
        return 1.0
    return min(a.grad_sup / origin, 1.0)
