"""
Verification suites
===================

Pydantic models for ``config/defaults.yaml`` and the deterministic per-trial
generators (symbols, test functions, Lipschitz multipliers). Every generator
draws its parameters from the trial seed alone, never from N, so a refined
grid samples the same continuum objects.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, Field

from alphamod.config import DEFAULTS_FILE
from alphamod.core.grid import frequency_to_space
from alphamod.core.operators import make_lipschitz
from alphamod.core.synthesis import synthesize
from alphamod.models.families import (
    BandLimitedFamily,
    BandLimitedSymbolFamily,
    GaussianFamily,
    LipschitzSineFamily,
    MultiplierFamily,
    PlaneWaveFamily,
    SmoothSymbolFamily,
    TrigTerm,
)
from alphamod.models.grid import GridSpec, SampledFunction, SampledSymbol, SymbolDomain
from alphamod.models.operators import LipschitzFunction

logger = logging.getLogger(__name__)


# ============================================================================
# CONFIGURATION MODELS
# ============================================================================

class FunctionSuite(BaseModel):
    gaussian_widths: List[float] = Field(default_factory=lambda: [0.3, 0.4])
    band: float = Field(4.0, gt=0)
    band_limited_count: int = Field(2, ge=0)
    plane_wave_max: int = Field(6, ge=1)


class LipschitzSuite(BaseModel):
    terms: int = Field(2, ge=1)
    max_frequency: int = Field(4, ge=1)


class BandLimitedSymbolSuite(BaseModel):
    omega: float = Field(1.0, gt=0)
    x_modes: int = Field(2, ge=0)
    harmonics: int = Field(2, ge=0)
    shift: float = Field(2.0, gt=0)


class SuiteSpec(BaseModel):
    """Test data shared by all checks of one verification run."""

    dim: int = Field(1, ge=1, le=2)
    points_per_axis: int = Field(128, ge=16)
    period: float = Field(2 * math.pi, gt=0)
    symbol_family: Literal["smooth", "multiplier", "identity"] = "smooth"
    x_modes: int = Field(2, ge=0)
    xi_modes: int = Field(2, ge=0)
    eta_multiple: int = Field(4, ge=1)
    functions: FunctionSuite = Field(default_factory=FunctionSuite)
    lipschitz: LipschitzSuite = Field(default_factory=LipschitzSuite)
    band_limited_symbol: BandLimitedSymbolSuite = Field(default_factory=BandLimitedSymbolSuite)

    def base_grid(self) -> GridSpec:
        return GridSpec(self.dim, self.points_per_axis, self.period)

    @property
    def eta_step(self) -> float:
        """Unit of the xi frequencies, fixed by the base grid so refinement keeps them on the eta lattice."""
        return self.eta_multiple * self.period / self.points_per_axis

    @property
    def x_step(self) -> float:
        return 2 * math.pi / self.period


class CheckDefaults(BaseModel):
    alphas: List[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0])
    epsilons: List[float] = Field(default_factory=lambda: [0.5, 0.25, 0.125])
    appendix_pairs: List[Tuple[str, str]] = Field(default_factory=lambda: [("2", "2"), ("inf", "1")])
    lemma32_half_width: float = Field(2.0, gt=0)
    lemma32_tau_scale: float = Field(4.0, gt=0)
    lemma31_period: float = Field(16 * math.pi, gt=0)
    lemma31_points: int = Field(256, ge=16)
    trials: Dict[str, int] = Field(default_factory=dict)

    def trials_for(self, check: str, fallback: int = 5) -> int:
        return self.trials.get(check, fallback)


class Ceilings(BaseModel):
    drift: float = 0.2
    partition_residual: float = 1e-8
    band_filter: float = 1.000001
    lemma31_pairing: float = 1e-10
    lemma31_leakage: float = 1e-10
    measure_slack: float = 1.05


class PowerIterationConfig(BaseModel):
    tol: float = Field(1e-8, gt=0)
    max_iter: int = Field(1000, ge=1)


class VerifyDefaults(BaseModel):
    suite: SuiteSpec = Field(default_factory=SuiteSpec)
    checks: CheckDefaults = Field(default_factory=CheckDefaults)
    ceilings: Ceilings = Field(default_factory=Ceilings)
    power_iteration: PowerIterationConfig = Field(default_factory=PowerIterationConfig)


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_verify_defaults(path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> VerifyDefaults:
    """Load the packaged defaults, deep-merge an optional YAML file and explicit overrides.

    Raises:
        FileNotFoundError: If ``path`` does not exist
    """
    with open(DEFAULTS_FILE, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        with open(path, "r", encoding="utf-8") as fh:
            data = _deep_merge(data, yaml.safe_load(fh) or {})
    if overrides:
        data = _deep_merge(data, overrides)
    return VerifyDefaults.model_validate(data)


# ============================================================================
# GENERATORS
# ============================================================================

def trial_symbol(suite: SuiteSpec, grid: GridSpec, seed: int) -> SampledSymbol:
    """Symbol of one trial: random smooth S^0_{0,0}, a random multiplier, or the identity."""
    if suite.symbol_family == "identity":
        return synthesize(MultiplierFamily(constant=1.0), grid, seed)
    if suite.symbol_family == "multiplier":
        rng = np.random.default_rng([seed, 3])
        terms = []
        for q in range(1, suite.xi_modes + 1):
            shift = [q * suite.eta_step] + [0.0] * (grid.dim - 1)
            re, im = rng.standard_normal(2) / (1 + q * q)
            terms.append({"amplitude": float(re), "amplitude_imag": float(im), "shift": shift})
        return synthesize(MultiplierFamily(constant=1.0, terms=terms), grid, seed)
    family = SmoothSymbolFamily(
        x_modes=suite.x_modes,
        xi_modes=suite.xi_modes,
        x_step=suite.x_step,
        eta_step=suite.eta_step,
    )
    return synthesize(family, grid, seed)


def trial_band_limited_symbol(suite: SuiteSpec, grid: GridSpec, seed: int) -> SampledSymbol:
    spec = suite.band_limited_symbol
    family = BandLimitedSymbolFamily(
        omega=spec.omega,
        x_modes=spec.x_modes,
        harmonics=spec.harmonics,
        shift=spec.shift,
        x_step=suite.x_step,
    )
    return synthesize(family, grid, seed)


def trial_functions(suite: SuiteSpec, grid: GridSpec, seed: int) -> List[SampledFunction]:
    """Gaussians, random band-limited functions and a plane wave for one trial."""
    rng = np.random.default_rng([seed, 1])
    spec = suite.functions
    functions = []
    for width in spec.gaussian_widths:
        center = rng.uniform(-0.25, 0.25, grid.dim).tolist()
        functions.append(synthesize(GaussianFamily(width=width, center=center), grid, seed))
    for index in range(spec.band_limited_count):
        family = BandLimitedFamily(band=spec.band)
        functions.append(synthesize(family, grid, 1000 * seed + index))
    wave = rng.integers(-spec.plane_wave_max, spec.plane_wave_max + 1, grid.dim) * suite.x_step
    functions.append(synthesize(PlaneWaveFamily(frequency=wave.tolist()), grid, seed))
    return functions


def trial_lipschitz_family(suite: SuiteSpec, dim: int, seed: int) -> LipschitzSineFamily:
    rng = np.random.default_rng([seed, 2])
    spec = suite.lipschitz
    terms = []
    for _ in range(spec.terms):
        index = rng.integers(-spec.max_frequency, spec.max_frequency + 1, dim)
        if not np.any(index):
            index[0] = 1
        terms.append(
            TrigTerm(
                amplitude=float(rng.uniform(0.5, 1.5)),
                frequency=(index * suite.x_step).tolist(),
                phase=float(rng.uniform(0.0, 2 * math.pi)),
            )
        )
    return LipschitzSineFamily(terms=terms)


def trial_lipschitz(suite: SuiteSpec, grid: GridSpec, seed: int) -> LipschitzFunction:
    """Non-constant real trigonometric multiplier of one trial."""
    return make_lipschitz(synthesize(trial_lipschitz_family(suite, grid.dim, seed), grid, seed))


def trial_vector_field(grid: GridSpec, seed: int, half_width: float, tau_scale: float) -> SampledSymbol:
    """g(x, tau) with g_tau^ supported in the box |y_i| <= half_width, tau on the xi lattice.

    Returned as an (x, xi)-tagged symbol whose second variable plays the role of tau.
    Coefficients are drawn only for tau within 6 tau_scale, in lattice order, so
    refinement at fixed L reuses the same draws.
    """
    n = grid.dim
    step = grid.frequency_step
    y_bound = int(math.floor(half_width / step + 1e-9))
    tau_bound = min(int(math.floor(6 * tau_scale / step)), grid.points_per_axis // 2 - 1)
    rng = np.random.default_rng([seed, 4])
    y_width, tau_width = 2 * y_bound + 1, 2 * tau_bound + 1
    draw_shape = (y_width,) * n + (tau_width,) * n
    coeffs = (rng.standard_normal(draw_shape) + 1j * rng.standard_normal(draw_shape)) / math.sqrt(2)

    tau_axis = np.arange(-tau_bound, tau_bound + 1) * step
    envelope = np.ones((1,) * n + (tau_width,) * n)
    for axis in range(n):
        shape = [1] * (2 * n)
        shape[n + axis] = tau_width
        envelope = envelope * np.exp(-(tau_axis**2) / (2 * tau_scale**2)).reshape(shape)

    origin = grid.points_per_axis // 2
    spectrum = np.zeros(grid.shape * 2, dtype=np.complex128)
    y_slice = (slice(origin - y_bound, origin + y_bound + 1),) * n
    tau_slice = (slice(origin - tau_bound, origin + tau_bound + 1),) * n
    spectrum[y_slice + tau_slice] = coeffs * envelope

    values = frequency_to_space(spectrum, grid, tuple(range(n)))
    return SampledSymbol(grid, values, SymbolDomain.X_XI)
