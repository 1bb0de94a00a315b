"""
Test families
=============

Declarative descriptions of the deterministic test functions and symbols
produced by ``alphamod.core.synthesis.synthesize``. Every family is
parameterised independently of N so that a refined grid samples the same
continuum object.
"""

from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field


class TrigTerm(BaseModel):
    """One term ``amplitude * cos(frequency . x + phase)``."""

    amplitude: float = Field(..., description="Real amplitude")
    frequency: List[float] = Field(..., description="Frequency vector (lattice multiple)")
    phase: float = Field(0.0, description="Phase shift")


class ShiftTerm(BaseModel):
    """One term ``amplitude * exp(i shift . xi)`` of a Fourier multiplier."""

    amplitude: float = Field(..., description="Real part of the amplitude")
    amplitude_imag: float = Field(0.0, description="Imaginary part of the amplitude")
    shift: List[float] = Field(..., description="eta shift (multiple of L/N)")


class GaussianFamily(BaseModel):
    kind: Literal["gaussian"] = "gaussian"
    width: float = Field(..., gt=0, description="Standard deviation")
    center: Optional[List[float]] = Field(None, description="Center (defaults to the origin)")


class PlaneWaveFamily(BaseModel):
    kind: Literal["plane_wave"] = "plane_wave"
    frequency: List[float] = Field(..., description="Frequency, must be a lattice point")


class BandLimitedFamily(BaseModel):
    """Random spectrum on the lattice points of the box ``|xi_i| <= band``."""

    kind: Literal["band_limited_random"] = "band_limited_random"
    band: float = Field(..., gt=0, description="Half-width of the spectral box")
    real: bool = Field(False, description="Hermitian-symmetrise to get a real function")


class LipschitzSineFamily(BaseModel):
    """Real trigonometric sum; the Lipschitz functions of the commutator estimates."""

    kind: Literal["lipschitz_sine"] = "lipschitz_sine"
    terms: List[TrigTerm] = Field(..., min_length=1)
    offset: float = Field(0.0, description="Constant added to the sum")


class MultiplierFamily(BaseModel):
    """x-independent symbol ``m(xi) = constant + sum amplitude * exp(i shift . xi)``."""

    kind: Literal["multiplier_symbol"] = "multiplier_symbol"
    constant: float = 1.0
    constant_imag: float = 0.0
    terms: List[ShiftTerm] = Field(default_factory=list)


class DerivativeFamily(BaseModel):
    """Symbol ``i xi_axis`` (unbounded, for the commutator sanity cases)."""

    kind: Literal["derivative_symbol"] = "derivative_symbol"
    axis: int = Field(0, ge=0)


class MultiplicationFamily(BaseModel):
    """xi-independent symbol ``a(x) = constant + sum amplitude * cos(frequency . x + phase)``."""

    kind: Literal["multiplication_symbol"] = "multiplication_symbol"
    constant: float = 0.0
    terms: List[TrigTerm] = Field(default_factory=list)


class SmoothSymbolFamily(BaseModel):
    """Random trigonometric symbol in S^0_{0,0}.

    ``sigma(x, xi) = sum_{p, q} c_pq exp(i p x_step . x) exp(i q eta_step . xi)`` with
    ``|p_i| <= x_modes``, ``|q_i| <= xi_modes`` and ``c_pq = (u + i v) / (1 + |p|^2 + |q|^2)``.
    """

    kind: Literal["smooth_symbol"] = "smooth_symbol"
    x_modes: int = Field(2, ge=0)
    xi_modes: int = Field(2, ge=0)
    x_step: float = Field(1.0, gt=0, description="Unit of the x frequencies (multiple of 2 pi/L)")
    eta_step: float = Field(..., gt=0, description="Unit of the xi frequencies (multiple of L/N)")


class BandLimitedSymbolFamily(BaseModel):
    """Random symbol whose xi-transform is supported in the ball ``|eta| < omega``.

    ``F_2 sigma(x, eta) = sum_p exp(i p x_step . x) B(|eta| / omega) sum_m d_pm exp(i m shift . eta)``
    with B the standard bump, so ``sigma(x, .)`` decays in xi.
    """

    kind: Literal["band_limited_symbol"] = "band_limited_symbol"
    omega: float = Field(1.0, gt=0, allow_inf_nan=False)
    x_modes: int = Field(2, ge=0)
    harmonics: int = Field(2, ge=0)
    shift: float = Field(2.0, gt=0, description="xi displacement per harmonic")
    x_step: float = Field(1.0, gt=0)


FunctionFamily = Union[GaussianFamily, PlaneWaveFamily, BandLimitedFamily, LipschitzSineFamily]
SymbolFamily = Union[
    MultiplierFamily,
    DerivativeFamily,
    MultiplicationFamily,
    SmoothSymbolFamily,
    BandLimitedSymbolFamily,
]
Family = Union[FunctionFamily, SymbolFamily]


class FamilySpec(BaseModel):
    """Wrapper used to parse a family from YAML/JSON by its ``kind``."""

    family: Family = Field(..., discriminator="kind")
