"""
Trial harness
=============

Runs per-trial callables with trial seeds ``seed + t``, serially (with an
optional tqdm bar) or through ``joblib.Parallel``, and repeats them on the
refined grid. Rows are always returned in (grid, trial) order, so reports do
not depend on the worker count.
"""

import logging
from typing import Callable, List, Optional, Tuple

from joblib import Parallel, delayed
from tqdm import tqdm

from alphamod.config import settings
from alphamod.core.grid import refine
from alphamod.models.grid import GridSpec
from alphamod.models.reports import TrialRow

logger = logging.getLogger(__name__)

TrialFn = Callable[[GridSpec, int, int], List[TrialRow]]


def run_trials(
    trial_fn: TrialFn,
    grid: GridSpec,
    trials: int,
    seed: int,
    jobs: Optional[int] = None,
    desc: str = "trials",
) -> List[TrialRow]:
    """Evaluate ``trial_fn(grid, trial, seed + trial)`` for every trial and flatten the rows."""
    jobs = settings.JOBS if jobs is None else jobs
    plan = [(t, seed + t) for t in range(trials)]
    if jobs == 1 or trials <= 1:
        iterator = tqdm(plan, desc=f"{desc} N={grid.points_per_axis}", disable=not settings.PROGRESS)
        results = [trial_fn(grid, t, s) for t, s in iterator]
    else:
        results = Parallel(n_jobs=jobs)(delayed(trial_fn)(grid, t, s) for t, s in plan)
    return [row for rows in results for row in rows]


def run_with_refinement(
    trial_fn: TrialFn,
    grid: GridSpec,
    trials: int,
    seed: int,
    refined: bool = True,
    jobs: Optional[int] = None,
    desc: str = "trials",
) -> Tuple[List[TrialRow], Optional[int]]:
    """Rows on ``grid`` followed by rows on the refined grid (same L, same seeds)."""
    rows = run_trials(trial_fn, grid, trials, seed, jobs, desc)
    if not refined:
        return rows, None
    fine = refine(grid)
    logger.info(f"{desc}: repeating {trials} trials at N={fine.points_per_axis}")
    rows += run_trials(trial_fn, fine, trials, seed, jobs, desc)
    return rows, fine.points_per_axis
