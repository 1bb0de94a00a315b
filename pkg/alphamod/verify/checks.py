"""
Bound checks
============

Each ``check_*`` function measures one estimate as a family of (lhs, rhs)
ratios over the verification suite and returns a ``BoundReport``. Trial
functions are module level (``functools.partial`` of picklable arguments) so
``joblib`` can ship them to worker processes.

Acceptance is boundedness plus refinement stability; derived constants are
enforced as ceilings where they are known on the lattice:

    band-limited pointwise    (2 pi)^(-n/2) sqrt(|Omega|_lattice / |Omega|)
    tau-integral (lemma32)    sqrt(|Omega|_lattice / |Omega|)
    filter Young bound        1
    regularised gradient      C of the regularising window
"""

import logging
import math
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from alphamod.core.covering import cached_covering
from alphamod.core.grid import (
    frequency_leakage,
    frequency_to_space,
    lattice_lp,
    lp_norm,
    make_grid,
    parse_exponent,
    space_to_frequency,
    xi_to_eta,
)
from alphamod.core.operators import (
    QuantizedOperator,
    band_filter_sup_bound,
    commutator_apply,
    make_lemma31_pair,
    mollification_deviation,
    mollify_convolve,
    mollify_cutoff,
    mollify_symbol,
    operator_norm_estimate,
    regularization_constant,
    regularize_lipschitz,
)
from alphamod.core.spaces import alpha_modulation_norm, check_band, nu_indices, product_symbol_norm
from alphamod.core.windows import DyadicWindows
from alphamod.exceptions import BandViolationError, UnsupportedParameterError
from alphamod.models.grid import BandSupport, GridSpec, SampledFunction, SampledSymbol, SymbolDomain
from alphamod.models.operators import LipschitzFunction, epsilon_of
from alphamod.models.reports import BoundReport, TrialRow
from alphamod.models.spaces import EXPONENT_LABELS, NormParams
from alphamod.verify.harness import run_trials, run_with_refinement
from alphamod.verify.suites import (
    PowerIterationConfig,
    SuiteSpec,
    VerifyDefaults,
    load_verify_defaults,
    trial_band_limited_symbol,
    trial_functions,
    trial_lipschitz,
    trial_symbol,
    trial_vector_field,
)

logger = logging.getLogger(__name__)

CEILING_SLACK = 1e-9
CONSTANT_COMMUTATOR_TOLERANCE = 1e-12

TARGETS = ("thm11", "thm12", "lemmas", "appendix", "all")


def _resolve(
    defaults: Optional[VerifyDefaults],
    suite: Optional[SuiteSpec],
    check: str,
    trials: Optional[int],
) -> Tuple[VerifyDefaults, SuiteSpec, int]:
    defaults = defaults or load_verify_defaults()
    suite = suite or defaults.suite
    trials = defaults.checks.trials_for(check) if trials is None else trials
    return defaults, suite, trials


def _inner(u: np.ndarray, v: np.ndarray, cell: float) -> complex:
    """<u, v> = cell * sum u conj(v)."""
    return complex(cell * np.vdot(v.ravel(), u.ravel()))


def _alpha_tag(alpha: float) -> str:
    return f"alpha{alpha:g}"


# ============================================================================
# THEOREM-LEVEL CHECKS
# ============================================================================

def _thm11_trial(
    suite: SuiteSpec,
    alpha: float,
    power: PowerIterationConfig,
    grid: GridSpec,
    trial: int,
    seed: int,
) -> List[TrialRow]:
    sigma = trial_symbol(suite, grid, seed)
    weight = alpha * grid.dim / 2
    params = NormParams(alpha=alpha, s1=weight, s2=weight)
    rhs = product_symbol_norm(sigma, params, cached_covering(alpha, grid)).total
    if rhs == 0.0:
        logger.info(f"thm11 trial {trial}: symbol has zero norm, skipped")
        return []
    estimate = operator_norm_estimate(sigma, tol=power.tol, max_iter=power.max_iter, seed=seed)
    if not estimate.converged:
        logger.warning(f"thm11 trial {trial} (seed {seed}): power iteration did not converge")
    return [TrialRow("thm11", alpha, trial, seed, estimate.norm, rhs, grid.points_per_axis)]


def check_thm11(
    alpha: float,
    suite: Optional[SuiteSpec] = None,
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> BoundReport:
    """Ratios ||sigma(X, D)||_{L^2 -> L^2} / ||sigma|| with weights s1 = s2 = alpha n / 2."""
    defaults, suite, trials = _resolve(defaults, suite, "thm11", trials)
    grid = suite.base_grid()
    trial_fn = partial(_thm11_trial, suite, alpha, defaults.power_iteration)
    rows, refined_n = run_with_refinement(trial_fn, grid, trials, seed, refined, jobs, f"thm11 alpha={alpha:g}")
    admissibility = cached_covering(alpha, grid).admissibility
    return BoundReport(
        "thm11",
        rows,
        grid.points_per_axis,
        refined_n,
        drift_tolerance=defaults.ceilings.drift,
        variant=_alpha_tag(alpha),
        metadata={
            "alpha": alpha,
            "seed": seed,
            "symbol_family": suite.symbol_family,
            "overlap_n0": admissibility.overlap_n0 if admissibility else None,
            "ratio_bound_K": admissibility.ratio_bound_K if admissibility else None,
        },
    )


def commutator_bound_row(
    check: str,
    alpha: Optional[float],
    sigma: SampledSymbol,
    a: LipschitzFunction,
    functions: Sequence[SampledFunction],
    symbol_norm: float,
    trial: int,
    seed: int,
) -> TrialRow:
    """Largest ||[T, a] f||_2 / (||grad a||_inf ||sigma|| ||f||_2) over ``functions``, as one row.

    A constant ``a`` gives the trivial row lhs = rhs = 0.
    """
    n_points = sigma.grid.points_per_axis
    best = TrialRow(check, alpha, trial, seed, 0.0, 0.0, n_points)
    if a.grad_sup == 0.0:
        return best
    for f in functions:
        f_norm = lp_norm(f, 2)
        if f_norm == 0.0:
            continue
        lhs = lp_norm(commutator_apply(sigma, a, f), 2)
        row = TrialRow(check, alpha, trial, seed, lhs, a.grad_sup * symbol_norm * f_norm, n_points)
        if row.ratio > best.ratio or best.rhs == 0.0:
            best = row
    return best


def _thm12_trial(suite: SuiteSpec, alpha: float, grid: GridSpec, trial: int, seed: int) -> List[TrialRow]:
    sigma = trial_symbol(suite, grid, seed)
    n = grid.dim
    params = NormParams(alpha=alpha, s1=alpha * n / 2, s2=alpha * n + 1)
    norm = product_symbol_norm(sigma, params, cached_covering(alpha, grid)).total
    if norm == 0.0:
        logger.info(f"thm12 trial {trial}: symbol has zero norm, skipped")
        return []
    a = trial_lipschitz(suite, grid, seed)
    functions = trial_functions(suite, grid, seed)
    return [commutator_bound_row("thm12", alpha, sigma, a, functions, norm, trial, seed)]


def _constant_commutator(suite: SuiteSpec, grid: GridSpec, seed: int) -> float:
    """||[T, c] f||_2 for a constant multiplier c; zero up to roundoff."""
    sigma = trial_symbol(suite, grid, seed)
    f = trial_functions(suite, grid, seed)[0]
    constant = LipschitzFunction(grid, np.full(grid.shape, 1.5), np.zeros((grid.dim,) + grid.shape))
    return lp_norm(commutator_apply(sigma, constant, f), 2)


def check_thm12(
    alpha: float,
    suite: Optional[SuiteSpec] = None,
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> BoundReport:
    """Ratios ||[sigma(X, D), a] f||_2 / (||grad a||_inf ||sigma|| ||f||_2).

    The symbol norm uses weights s1 = alpha n / 2 and s2 = alpha n + 1.
    """
    defaults, suite, trials = _resolve(defaults, suite, "thm12", trials)
    grid = suite.base_grid()
    trial_fn = partial(_thm12_trial, suite, alpha)
    rows, refined_n = run_with_refinement(trial_fn, grid, trials, seed, refined, jobs, f"thm12 alpha={alpha:g}")
    constant = _constant_commutator(suite, grid, seed)
    admissibility = cached_covering(alpha, grid).admissibility
    return BoundReport(
        "thm12",
        rows,
        grid.points_per_axis,
        refined_n,
        drift_tolerance=defaults.ceilings.drift,
        variant=_alpha_tag(alpha),
        conditions={"constant_commutator_vanishes": constant <= CONSTANT_COMMUTATOR_TOLERANCE},
        metadata={
            "alpha": alpha,
            "seed": seed,
            "constant_commutator_l2": constant,
            "overlap_n0": admissibility.overlap_n0 if admissibility else None,
            "ratio_bound_K": admissibility.ratio_bound_K if admissibility else None,
        },
    )


def _appendix_label(p: float, q: float) -> str:
    return f"p{EXPONENT_LABELS[p]}_q{EXPONENT_LABELS[q]}"


def _appendix_trial(suite: SuiteSpec, p: float, q: float, grid: GridSpec, trial: int, seed: int) -> List[TrialRow]:
    nu1, nu2 = nu_indices(p, q)
    n = grid.dim
    modulation = cached_covering(0.0, grid)
    dyadic = cached_covering(1.0, grid)
    m_params = NormParams(alpha=0.0, p=p, q=q, s=0.0)
    upper = NormParams(alpha=1.0, p=p, q=q, s=float(n * nu1))
    lower = NormParams(alpha=1.0, p=p, q=q, s=float(n * nu2))
    label = _appendix_label(p, q)
    rows = []
    for index, f in enumerate(trial_functions(suite, grid, seed)):
        m_norm = alpha_modulation_norm(f, m_params, modulation).total
        if m_norm == 0.0:
            logger.info(f"appendix trial {trial}: function {index} vanishes, skipped")
            continue
        b_upper = alpha_modulation_norm(f, upper, dyadic).total
        b_lower = alpha_modulation_norm(f, lower, dyadic).total
        rows.append(TrialRow(f"appendix_upper_{label}", None, trial, seed, m_norm, b_upper, grid.points_per_axis))
        rows.append(TrialRow(f"appendix_lower_{label}", None, trial, seed, b_lower, m_norm, grid.points_per_axis))
    return rows


def check_appendix_inclusions(
    p: Union[float, str],
    q: Union[float, str],
    suite: Optional[SuiteSpec] = None,
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> BoundReport:
    """Ratios ||f||_M / ||f||_{B_{n nu1}} (upper) and ||f||_{B_{n nu2}} / ||f||_M (lower).

    Raises:
        UnsupportedParameterError: If p or q is not 1, 2 or inf
    """
    p_value, q_value = parse_exponent(p), parse_exponent(q)
    defaults, suite, trials = _resolve(defaults, suite, "appendix", trials)
    grid = suite.base_grid()
    label = _appendix_label(p_value, q_value)
    trial_fn = partial(_appendix_trial, suite, p_value, q_value)
    rows, refined_n = run_with_refinement(trial_fn, grid, trials, seed, refined, jobs, f"appendix {label}")
    nu1, nu2 = nu_indices(p_value, q_value)
    return BoundReport(
        "appendix",
        rows,
        grid.points_per_axis,
        refined_n,
        drift_tolerance=defaults.ceilings.drift,
        variant=label,
        metadata={"p": EXPONENT_LABELS[p_value], "q": EXPONENT_LABELS[q_value], "nu1": str(nu1), "nu2": str(nu2)},
    )


# ============================================================================
# BAND-LIMITED ESTIMATES
# ============================================================================

def lemma32_row(g: SampledSymbol, omega: BandSupport, trial: int = 0, seed: int = 0) -> TrialRow:
    """||h||_2 against |Omega|^(1/2) ||g||_{L^2 x L^2} for h(x) = int e^{i x.tau} g(x, tau) d tau.

    ``g`` is (x, xi)-tagged; its second variable is tau on the xi lattice.
    """
    g.require(SymbolDomain.X_XI)
    grid = g.grid
    n = grid.dim
    h = (2 * math.pi) ** n * QuantizedOperator(g).apply_spectrum(np.ones(grid.shape, dtype=np.complex128))
    lhs = lattice_lp(h, 2.0, grid.spacing**n)
    g_norm = lattice_lp(g.values, 2.0, (grid.spacing * grid.frequency_step) ** n)
    return TrialRow("lemma32", None, trial, seed, lhs, math.sqrt(omega.measure) * g_norm, grid.points_per_axis)


def _field_leakage(g: SampledSymbol, omega: BandSupport) -> float:
    grid = g.grid
    n = grid.dim
    spectrum = space_to_frequency(g.values, grid, tuple(range(n)))
    outside = ~omega.contains(grid.frequency_points()).reshape(grid.shape + (1,) * n)
    return frequency_leakage(spectrum, np.broadcast_to(outside, spectrum.shape))


def _lemma32_trial(half_width: float, tau_scale: float, grid: GridSpec, trial: int, seed: int) -> List[TrialRow]:
    omega = BandSupport.box(half_width, grid.dim)
    g = trial_vector_field(grid, seed, half_width, tau_scale)
    check_band(_field_leakage(g, omega), "lemma32 field")
    return [lemma32_row(g, omega, trial, seed)]


def _lattice_factor(omega: BandSupport, points: np.ndarray, cell: float) -> float:
    return math.sqrt(omega.lattice_measure(points, cell) / omega.measure)


def check_lemma32(
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    suite: Optional[SuiteSpec] = None,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> BoundReport:
    """Ratios ||h||_2 / (|Omega|^(1/2) ||g||) for random fields with x-spectrum in a box Omega.

    Raises:
        BandViolationError: If the box does not fit in the truncation band
    """
    defaults, suite, trials = _resolve(defaults, suite, "lemma32", trials)
    grid = suite.base_grid()
    half_width = defaults.checks.lemma32_half_width
    if half_width > 0.8 * grid.nyquist:
        raise BandViolationError(f"Omega half-width {half_width} exceeds the truncation band")
    trial_fn = partial(_lemma32_trial, half_width, defaults.checks.lemma32_tau_scale)
    rows, refined_n = run_with_refinement(trial_fn, grid, trials, seed, refined, jobs, "lemma32")
    omega = BandSupport.box(half_width, grid.dim)
    factor = _lattice_factor(omega, grid.frequency_points(), grid.frequency_step**grid.dim)
    return BoundReport(
        "lemma32",
        rows,
        grid.points_per_axis,
        refined_n,
        ceiling=factor * (1 + CEILING_SLACK),
        drift_tolerance=defaults.ceilings.drift,
        metadata={"derived_constant": 1.0, "lattice_factor": factor, "omega_measure": omega.measure},
    )


def band_limited_rows(
    sigma: SampledSymbol,
    omega: BandSupport,
    functions: Sequence[SampledFunction],
    trial: int = 0,
    seed: int = 0,
) -> List[TrialRow]:
    """L^2 and pointwise rows for a symbol whose xi-transform lies in ``omega``.

    Each family keeps the function with the largest ratio; the pointwise row is
    taken at the x maximising |sigma(X, D) f(x)| / (|Omega|^(1/2) ||sigma(x, .)||_2 ||f||_inf).
    """
    grid = sigma.grid
    n = grid.dim
    n_points = grid.points_per_axis
    operator = QuantizedOperator(sigma)
    xi_axes = tuple(range(n, 2 * n))
    symbol_l2 = np.sqrt(grid.frequency_step**n * np.sum(np.abs(sigma.values) ** 2, axis=xi_axes))
    root = math.sqrt(omega.measure)

    best_l2 = TrialRow("band_limited_l2", None, trial, seed, 0.0, 0.0, n_points)
    best_point = TrialRow("band_limited_pointwise", None, trial, seed, 0.0, 0.0, n_points)
    for f in functions:
        tf = operator.apply(f).values
        row = TrialRow(
            "band_limited_l2", None, trial, seed,
            lattice_lp(tf, 2.0, grid.spacing**n), root * float(symbol_l2.max()) * lp_norm(f, 2), n_points,
        )
        if row.ratio > best_l2.ratio:
            best_l2 = row
        bound = root * symbol_l2 * float(np.abs(f.values).max())
        ratios = np.divide(np.abs(tf), bound, out=np.zeros(grid.shape), where=bound > 0)
        j = np.unravel_index(int(np.argmax(ratios)), grid.shape)
        row = TrialRow("band_limited_pointwise", None, trial, seed, float(abs(tf[j])), float(bound[j]), n_points)
        if row.ratio > best_point.ratio:
            best_point = row
    return [best_l2, best_point]


def _band_limited_trial(suite: SuiteSpec, grid: GridSpec, trial: int, seed: int) -> List[TrialRow]:
    omega = BandSupport.ball(suite.band_limited_symbol.omega, grid.dim)
    sigma = trial_band_limited_symbol(suite, grid, seed)
    n = grid.dim
    transformed = xi_to_eta(sigma.values, grid, tuple(range(n, 2 * n)))
    outside = ~omega.contains(grid.spatial_points()).reshape((1,) * n + grid.shape)
    check_band(frequency_leakage(transformed, np.broadcast_to(outside, transformed.shape)), "band-limited symbol")
    return band_limited_rows(sigma, omega, trial_functions(suite, grid, seed), trial, seed)


def check_band_limited_bounds(
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    suite: Optional[SuiteSpec] = None,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> BoundReport:
    """L^2 and pointwise bounds for symbols band-limited in xi; the pointwise family has a derived ceiling."""
    defaults, suite, trials = _resolve(defaults, suite, "band_limited", trials)
    grid = suite.base_grid()
    rows, refined_n = run_with_refinement(
        partial(_band_limited_trial, suite), grid, trials, seed, refined, jobs, "band_limited"
    )
    n = grid.dim
    omega = BandSupport.ball(suite.band_limited_symbol.omega, n)
    factor = _lattice_factor(omega, grid.spatial_points(), grid.spacing**n)
    constant = (2 * math.pi) ** (-n / 2)
    return BoundReport(
        "band_limited_bounds",
        rows,
        grid.points_per_axis,
        refined_n,
        drift_tolerance=defaults.ceilings.drift,
        family_ceilings={"band_limited_pointwise": constant * factor * (1 + CEILING_SLACK)},
        conditions={"lattice_measure_resolved": factor <= defaults.ceilings.measure_slack},
        metadata={"derived_constant": constant, "lattice_factor": factor, "omega_measure": omega.measure},
    )


def _highfreq_levels(a: LipschitzFunction) -> List[Tuple[int, float]]:
    """(j, 2^j ||phi_j(D) a||_inf) for every dyadic level j >= 1 meeting the band."""
    grid = a.grid
    axes = tuple(range(grid.dim))
    spectrum = space_to_frequency(a.values.astype(np.complex128), grid, axes)
    windows = DyadicWindows(grid.dim)
    xi = grid.frequency_points()
    reach = 0.8 * grid.nyquist * math.sqrt(grid.dim)
    levels = []
    level = 1
    while 2.0 ** (level - 1) < reach:
        band = frequency_to_space(windows.evaluate(level, xi) * spectrum, grid, axes)
        levels.append((level, 2.0**level * float(np.abs(band).max())))
        level += 1
    return levels


def check_highfreq_decay(a: LipschitzFunction, refined_a: Optional[LipschitzFunction] = None) -> BoundReport:
    """Ratios 2^j ||phi_j(D) a||_inf / ||grad a||_inf, one row per level j (``trial`` = j).

    Raises:
        UnsupportedParameterError: If ``a`` is constant
    """
    rows = []
    for sample in (a, refined_a):
        if sample is None:
            continue
        if sample.grad_sup == 0.0:
            raise UnsupportedParameterError("high-frequency decay needs a non-constant a")
        for level, value in _highfreq_levels(sample):
            rows.append(TrialRow("highfreq_decay", None, level, 0, value, sample.grad_sup, sample.grid.points_per_axis))
    return BoundReport(
        "highfreq_decay",
        rows,
        a.grid.points_per_axis,
        refined_a.grid.points_per_axis if refined_a is not None else None,
    )


def _highfreq_trial(suite: SuiteSpec, grid: GridSpec, trial: int, seed: int) -> List[TrialRow]:
    a = trial_lipschitz(suite, grid, seed)
    top = max(value for _, value in _highfreq_levels(a))
    return [TrialRow("highfreq_decay", None, trial, seed, top, a.grad_sup, grid.points_per_axis)]


def check_highfreq_suite(
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    suite: Optional[SuiteSpec] = None,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> BoundReport:
    """``check_highfreq_decay`` over the Lipschitz suite, one row (max over j) per trial."""
    defaults, suite, trials = _resolve(defaults, suite, "highfreq", trials)
    grid = suite.base_grid()
    trial_fn = partial(_highfreq_trial, suite)
    rows, refined_n = run_with_refinement(trial_fn, grid, trials, seed, refined, jobs, "highfreq")
    return BoundReport("highfreq_decay", rows, grid.points_per_axis, refined_n, drift_tolerance=defaults.ceilings.drift)


# ============================================================================
# SMOOTHING CHECKS
# ============================================================================

def check_lemma31(grid: Optional[GridSpec] = None, *, defaults: Optional[VerifyDefaults] = None) -> BoundReport:
    """One row |(2 pi / L)^n sum phi chi - 1| for the phi/chi pair; leakage is a pass condition."""
    defaults = defaults or load_verify_defaults()
    if grid is None:
        grid = make_grid(defaults.suite.dim, defaults.checks.lemma31_points, defaults.checks.lemma31_period)
    pair = make_lemma31_pair(grid)
    error = abs(pair.pairing - 1.0)
    row = TrialRow("lemma31", None, 0, 0, error, 1.0, grid.points_per_axis)
    return BoundReport(
        "lemma31",
        [row],
        grid.points_per_axis,
        conditions={
            "pairing": error <= defaults.ceilings.lemma31_pairing,
            "support_leakage": pair.leakage <= defaults.ceilings.lemma31_leakage,
        },
        metadata=pair.summary(),
    )


def _band_filter_trial(
    suite: SuiteSpec, alphas: Tuple[float, ...], grid: GridSpec, trial: int, seed: int
) -> List[TrialRow]:
    sigma = trial_symbol(suite, grid, seed)
    rows = []
    for alpha in alphas:
        frame = band_filter_sup_bound(sigma, cached_covering(alpha, grid))
        if frame.empty:
            continue
        top = frame.loc[frame["ratio"].idxmax()]
        lhs, rhs = float(top["band_sup"]), float(top["bound"])
        rows.append(TrialRow("band_filter", alpha, trial, seed, lhs, rhs, grid.points_per_axis))
    return rows


def check_band_filter(
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    alphas: Optional[Sequence[float]] = None,
    suite: Optional[SuiteSpec] = None,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
) -> BoundReport:
    """Worst pair ratio sup|psi_Q(D_x) psi_Q'(D_xi) sigma| / Young bound per trial and alpha."""
    defaults, suite, trials = _resolve(defaults, suite, "band_filter", trials)
    grid = suite.base_grid()
    alphas = tuple(defaults.checks.alphas if alphas is None else alphas)
    rows = run_trials(partial(_band_filter_trial, suite, alphas), grid, trials, seed, jobs, "band_filter")
    return BoundReport(
        "band_filter",
        rows,
        grid.points_per_axis,
        ceiling=defaults.ceilings.band_filter,
        drift_tolerance=defaults.ceilings.drift,
        metadata={"alphas": list(alphas)},
    )


def _eps_tag(epsilon: float) -> str:
    return f"[eps={epsilon:g}]"


def _mollification_trial(
    suite: SuiteSpec,
    alpha: float,
    epsilons: Tuple[float, ...],
    grid: GridSpec,
    trial: int,
    seed: int,
) -> List[TrialRow]:
    sigma = trial_symbol(suite, grid, seed)
    covering = cached_covering(alpha, grid)
    weight = alpha * grid.dim / 2
    params = NormParams(alpha=alpha, s1=weight, s2=weight)

    def norm(symbol: SampledSymbol) -> float:
        return product_symbol_norm(symbol, params, covering, strict=False).total

    base = norm(sigma)
    if base == 0.0:
        logger.info(f"mollification trial {trial}: symbol has zero norm, skipped")
        return []
    n_points = grid.points_per_axis
    rows = []
    for epsilon in epsilons:
        tag = _eps_tag(epsilon)
        mollified = mollify_symbol(sigma, epsilon)
        steps = {
            "mollify_full": mollified,
            "mollify_cutoff": mollify_cutoff(sigma, epsilon),
            "mollify_convolution": mollify_convolve(sigma, epsilon),
        }
        for label, symbol in steps.items():
            rows.append(TrialRow(f"{label}{tag}", alpha, trial, seed, norm(symbol), base, n_points))
        deviation, scale = mollification_deviation(sigma, mollified)
        rows.append(TrialRow(f"mollify_deviation{tag}", alpha, trial, seed, deviation, scale, n_points))
    return rows


def _shrinks(rows: List[TrialRow], prefix: str, epsilons: Sequence[float], grid_n: int) -> Dict[str, bool]:
    """Per trial: the value at the smallest epsilon does not exceed the value at the largest."""
    ordered = sorted(epsilons, reverse=True)
    values: Dict[Tuple[int, float], float] = {}
    for row in rows:
        if row.grid_N != grid_n:
            continue
        for epsilon in ordered:
            if row.check == f"{prefix}{_eps_tag(epsilon)}":
                values[(row.trial, epsilon)] = row.lhs
    result = {}
    for trial in sorted({trial for trial, _ in values}):
        present = [values[(trial, e)] for e in ordered if (trial, e) in values]
        result[f"trial{trial}"] = len(present) < 2 or present[-1] <= present[0]
    return result


def check_mollification(
    alpha: float,
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    suite: Optional[SuiteSpec] = None,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> BoundReport:
    """Norm ratios ||sigma_eps|| / ||sigma|| (full, cutoff step, convolution step) and the local deviation."""
    defaults, suite, trials = _resolve(defaults, suite, "mollification", trials)
    grid = suite.base_grid()
    epsilons = tuple(defaults.checks.epsilons)
    trial_fn = partial(_mollification_trial, suite, alpha, epsilons)
    rows, refined_n = run_with_refinement(trial_fn, grid, trials, seed, refined, jobs, f"mollification alpha={alpha:g}")
    shrinking = _shrinks(rows, "mollify_deviation", epsilons, grid.points_per_axis)
    full = [r.ratio for r in rows if r.check.startswith("mollify_full") and r.grid_N == grid.points_per_axis]
    return BoundReport(
        "mollification",
        rows,
        grid.points_per_axis,
        refined_n,
        drift_tolerance=defaults.ceilings.drift,
        variant=_alpha_tag(alpha),
        conditions={"deviation_shrinks": all(shrinking.values())},
        metadata={
            "alpha": alpha,
            "epsilons": list(epsilons),
            "C": max(full) if full else None,
            "deviation_shrinks": shrinking,
        },
    )


def _regularization_trial(
    suite: SuiteSpec, epsilons: Tuple[float, ...], grid: GridSpec, trial: int, seed: int
) -> List[TrialRow]:
    a = trial_lipschitz(suite, grid, seed)
    sigma = trial_symbol(suite, grid, seed)
    functions = trial_functions(suite, grid, seed)
    f, g = functions[0], functions[-1]
    cell = grid.spacing**grid.dim
    limit = epsilon_of(a)

    commutator = commutator_apply(sigma, a, f, strict=False)
    pairing = _inner(commutator.values, g.values, cell)
    scale = lp_norm(commutator, 2) * lp_norm(g, 2)
    n_points = grid.points_per_axis
    rows = []
    for epsilon in epsilons:
        if epsilon >= limit:
            logger.info(f"regularization trial {trial}: epsilon {epsilon:g} >= epsilon(a) = {limit:.4g}, skipped")
            continue
        tag = _eps_tag(epsilon)
        regularized = regularize_lipschitz(a, epsilon)
        rows.append(TrialRow(f"regularize_grad{tag}", None, trial, seed, regularized.grad_sup, a.grad_sup, n_points))
        shifted = _inner(commutator_apply(sigma, regularized, f, strict=False).values, g.values, cell)
        rows.append(TrialRow(f"regularize_pairing{tag}", None, trial, seed, abs(shifted - pairing), scale, n_points))
    return rows


def check_regularization(
    trials: Optional[int] = None,
    seed: int = 42,
    *,
    suite: Optional[SuiteSpec] = None,
    defaults: Optional[VerifyDefaults] = None,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> BoundReport:
    """Gradient ratios ||grad a_eps|| / ||grad a|| against the explicit C, and the shrinking pairing gap."""
    defaults, suite, trials = _resolve(defaults, suite, "regularization", trials)
    grid = suite.base_grid()
    epsilons = tuple(defaults.checks.epsilons)
    trial_fn = partial(_regularization_trial, suite, epsilons)
    rows, refined_n = run_with_refinement(trial_fn, grid, trials, seed, refined, jobs, "regularization")
    constants = regularization_constant(grid.dim)
    shrinking = _shrinks(rows, "regularize_pairing", epsilons, grid.points_per_axis)
    return BoundReport(
        "regularization",
        rows,
        grid.points_per_axis,
        refined_n,
        drift_tolerance=defaults.ceilings.drift,
        family_ceilings={"regularize_grad": constants["C"]},
        conditions={"pairing_gap_shrinks": all(shrinking.values())},
        metadata={"epsilons": list(epsilons), "constants": constants, "pairing_gap_shrinks": shrinking},
    )


# ============================================================================
# ENTRY POINT
# ============================================================================

def run_verification(
    target: str,
    *,
    defaults: Optional[VerifyDefaults] = None,
    alphas: Optional[Sequence[float]] = None,
    trials: Optional[int] = None,
    seed: int = 42,
    jobs: Optional[int] = None,
    refined: bool = True,
) -> List[BoundReport]:
    """Run the checks of ``target`` (thm11, thm12, lemmas, appendix or all) in a fixed order.

    Raises:
        UnsupportedParameterError: If ``target`` is unknown
    """
    if target not in TARGETS:
        raise UnsupportedParameterError(f"unknown verification target {target!r}; expected one of {TARGETS}")
    defaults = defaults or load_verify_defaults()
    alphas = list(defaults.checks.alphas if alphas is None else alphas)
    suite = defaults.suite
    common = {"defaults": defaults, "jobs": jobs}
    refining = {**common, "refined": refined}
    reports: List[BoundReport] = []

    if target in ("lemmas", "all"):
        logger.info("Running lemma checks")
        reports.append(check_lemma31(defaults=defaults))
        reports.append(check_lemma32(trials, seed, suite=suite, **refining))
        reports.append(check_band_limited_bounds(trials, seed, suite=suite, **refining))
        reports.append(check_band_filter(trials, seed, alphas=alphas, suite=suite, **common))
        reports.append(check_highfreq_suite(trials, seed, suite=suite, **refining))
        for alpha in alphas:
            reports.append(check_mollification(alpha, trials, seed, suite=suite, **refining))
        reports.append(check_regularization(trials, seed, suite=suite, **refining))
    if target in ("thm11", "all"):
        for alpha in alphas:
            reports.append(check_thm11(alpha, suite, trials, seed, **refining))
    if target in ("thm12", "all"):
        for alpha in alphas:
            reports.append(check_thm12(alpha, suite, trials, seed, **refining))
    if target in ("appendix", "all"):
        for p, q in defaults.checks.appendix_pairs:
            reports.append(check_appendix_inclusions(p, q, suite, trials, seed, **refining))

    for report in reports:
        status = "✅" if report.passed else "❌"
        logger.info(f"{status} {report.name}: max ratio {report.max_ratio:.6g}")
    return reports
