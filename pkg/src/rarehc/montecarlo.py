"""Monte Carlo power experiments for HC and the two comparison applications."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import ndtr

from . import rng as rngmod
from .errors import DomainError
from .hc import hc_star_array
from .models import ModelSpec, RareWeakParams, clip_pvalues, sample_h1
from .parallel import map_replicates

__all__ = [
    "PowerEstimate",
    "RowModelParams",
    "AggregateModelParams",
    "calibrate_threshold",
    "null_hc_statistics",
    "error_rates",
    "best_error_sum",
    "power_point",
    "power_sweep",
    "row_scores",
    "rows_experiment",
    "aggregate_scores",
    "aggregate_experiment",
    "DEFAULT_LEVEL",
    "DEFAULT_REPS",
    "DEFAULT_CAL_REPS",
]

DEFAULT_LEVEL = 0.05
DEFAULT_REPS = 400
DEFAULT_CAL_REPS = 4000


@dataclass
class PowerEstimate:
    beta: float
    r: float
    n: int
    reps: int
    threshold: float
    level: float
    type1: float
    type2: float
    error_sum: float
    se: float
    best_error_sum: float
    calibration_seed: int
    variant: str = "hc"


@dataclass(frozen=True)
class RowModelParams:
    """``n`` rows of ``k`` cells; one Bernoulli(eps_n) per row plants the whole row."""

    n: int
    k: int
    beta: float
    r: float

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"k must be at least 1, got {self.k}")
        RareWeakParams(self.n, self.beta, self.r)

    @property
    def epsilon(self):
        return float(self.n) ** (-self.beta)

    @property
    def mu(self):
        return math.sqrt(2.0 * self.r * math.log(self.n))


@dataclass(frozen=True)
class AggregateModelParams:
    """Dense weak shift ``a_n = n**-a_exponent`` plus rare strong effects."""

    n: int
    beta: float
    r: float
    a_exponent: float

    def __post_init__(self):
        if not self.a_exponent > 0:
            raise DomainError(f"a_exponent must be positive, got {self.a_exponent}")
        RareWeakParams(self.n, self.beta, self.r)

    @property
    def epsilon(self):
        return float(self.n) ** (-self.beta)

    @property
    def mu(self):
        return math.sqrt(2.0 * self.r * math.log(self.n))

    @property
    def a(self):
        return float(self.n) ** (-self.a_exponent)


# ----------------------------------------------------------------- helpers


def _quantile_threshold(null_stats, level):
    if not 0.0 < level <= 1.0:
        raise DomainError(f"level must lie in (0, 1], got {level}")
    if level == 1.0:
        return -math.inf
    return float(np.quantile(np.asarray(null_stats), 1.0 - level, method="lower"))


def error_rates(null_stats, alt_stats, threshold):
    """``(type1, type2)`` of the test rejecting when the statistic exceeds ``threshold``."""
    t1 = float(np.mean(np.asarray(null_stats) > threshold))
    t2 = float(np.mean(np.asarray(alt_stats) <= threshold))
    return t1, t2


def best_error_sum(null_stats, alt_stats):
    """Smallest type1 + type2 over every threshold in the pooled range."""
    null_stats = np.sort(np.asarray(null_stats, dtype=np.float64))
    alt_stats = np.sort(np.asarray(alt_stats, dtype=np.float64))
    cand = np.concatenate(([-np.inf], null_stats, alt_stats))
    t1 = 1.0 - np.searchsorted(null_stats, cand, side="right") / null_stats.size
    t2 = np.searchsorted(alt_stats, cand, side="right") / alt_stats.size
    return float(np.min(t1 + t2))


def _se(t1, t2, reps_null, reps_alt):
    return math.sqrt(t1 * (1 - t1) / reps_null + t2 * (1 - t2) / reps_alt)


def _seeds(seed, stream, cell, reps):
    return [rngmod.substream_seed(seed, stream, cell, i) for i in range(reps)]


# -------------------------------------------------------------- calibration


def _null_hc_rep(task):
    n, gamma0, seed = task
    p = clip_pvalues(np.random.default_rng(seed).random(n))
    return hc_star_array(p, gamma0)[0]


def null_hc_statistics(n, gamma0, reps, seed, stream=rngmod.CALIBRATION, cell=0, workers=1):
    tasks = [(n, gamma0, s) for s in _seeds(seed, stream, cell, reps)]
    return np.array(map_replicates(_null_hc_rep, tasks, workers))


def calibrate_threshold(n, gamma0, level, reps, seed, workers=1):
    """Empirical (1 - level) quantile of null HC (lower nearest rank).

    ``level == 1`` returns ``-inf`` (always reject).
    """
    if not 0.0 < level <= 1.0:
        raise DomainError(f"level must lie in (0, 1], got {level}")
    if level == 1.0:
        return -math.inf
    if reps < 100:
        raise DomainError(f"calibration needs at least 100 replicates, got {reps}")
    return _quantile_threshold(null_hc_statistics(n, gamma0, reps, seed, workers=workers), level)


# -------------------------------------------------------------------- power


def _alt_hc_rep(task):
    params, model, seed = task
    sample = sample_h1(params, model, np.random.default_rng(seed))
    return hc_star_array(sample.pvalues, params.gamma0)[0]


def power_point(
    params,
    model=ModelSpec(),
    level=DEFAULT_LEVEL,
    reps=DEFAULT_REPS,
    seed=0,
    cal_reps=DEFAULT_CAL_REPS,
    workers=1,
    cell=0,
    threshold=None,
):
    """Error sum of the level-calibrated HC test at one (beta, r, n).

    The threshold comes from a calibration run on its own substream; type I
    error is then re-estimated on fresh null draws, type II on alternative
    draws.  ``threshold`` may be passed in to share one calibration between
    cells with the same ``n`` and ``gamma0``.
    """
    if not model.sampled:
        raise DomainError(f"no P-value sampler for family {model.family.value}")
    if threshold is None:
        threshold = calibrate_threshold(params.n, params.gamma0, level, cal_reps, seed, workers)
    null = null_hc_statistics(params.n, params.gamma0, reps, seed, rngmod.NULL, cell, workers)
    alt_tasks = [(params, model, s) for s in _seeds(seed, rngmod.ALTERNATIVE, cell, reps)]
    alt = np.array(map_replicates(_alt_hc_rep, alt_tasks, workers))
    t1, t2 = error_rates(null, alt, threshold)
    return PowerEstimate(
        params.beta,
        params.r,
        params.n,
        reps,
        threshold,
        level,
        t1,
        t2,
        t1 + t2,
        _se(t1, t2, reps, reps),
        best_error_sum(null, alt),
        int(seed),
    )


def power_sweep(
    grid,
    n,
    model=ModelSpec(),
    level=DEFAULT_LEVEL,
    reps=DEFAULT_REPS,
    seed=0,
    gamma0=0.1,
    cal_reps=DEFAULT_CAL_REPS,
    workers=1,
):
    """``power_point`` over a list of ``(beta, r)`` cells sharing one threshold.

    A cell that fails yields ``None`` in its slot instead of aborting the sweep.
    """
    threshold = calibrate_threshold(n, gamma0, level, cal_reps, seed, workers)
    out = []
    for cell, (beta, r) in enumerate(grid):
        try:
            params = RareWeakParams(n, beta, r, gamma0)
            out.append(power_point(params, model, level, reps, seed, cal_reps, workers, cell, threshold))
        except (DomainError, ValueError, ArithmeticError):
            out.append(None)
    return out


# ------------------------------------------------------- coupled-rows model


def row_scores(params, rng, alternative=True):
    """One draw of the row model.

    Returns ``(naive_z, reduced_z, planted_rows)``: the ``n*k`` cell
    z-scores, the ``n`` row sums scaled by ``1/sqrt(k)``, and the planted
    row indices.
    """
    x = rng.standard_normal((params.n, params.k))
    if alternative:
        planted = np.flatnonzero(rng.random(params.n) < params.epsilon)
        x[planted] += params.mu
    else:
        planted = np.empty(0, dtype=np.int64)
    reduced = x.sum(axis=1) / math.sqrt(params.k)
    return x.ravel(), reduced, planted


def _rows_rep(task):
    params, gamma0, alternative, seed = task
    naive, reduced, _ = row_scores(params, np.random.default_rng(seed), alternative)
    return (
        hc_star_array(clip_pvalues(ndtr(-naive)), gamma0)[0],
        hc_star_array(clip_pvalues(ndtr(-reduced)), gamma0)[0],
    )


def rows_experiment(
    params, level=DEFAULT_LEVEL, reps=DEFAULT_REPS, seed=0, gamma0=0.1, cal_reps=DEFAULT_CAL_REPS, workers=1
):
    """HC on the ``n*k`` per-cell P-values versus the ``n`` row-reduced P-values.

    Returns ``(naive, reduced)`` estimates, each thresholded at its own
    null calibration.
    """
    def run(stream, alternative, count):
        tasks = [(params, gamma0, alternative, s) for s in _seeds(seed, stream, 0, count)]
        return np.array(map_replicates(_rows_rep, tasks, workers)).reshape(count, 2)

    cal = run(rngmod.ROWS_CALIBRATION, False, cal_reps)
    null = run(rngmod.ROWS_NULL, False, reps)
    alt = run(rngmod.ROWS_ALT, True, reps)
    out = []
    for j, variant in enumerate(("naive", "reduced")):
        thr = _quantile_threshold(cal[:, j], level)
        t1, t2 = error_rates(null[:, j], alt[:, j], thr)
        n_eff = params.n * params.k if variant == "naive" else params.n
        out.append(
            PowerEstimate(
                params.beta, params.r, n_eff, reps, thr, level, t1, t2, t1 + t2,
                _se(t1, t2, reps, reps), best_error_sum(null[:, j], alt[:, j]), int(seed), variant,
            )
        )
    return tuple(out)


# --------------------------------------------- dense weak plus rare strong


def aggregate_scores(params, rng, alternative=True):
    x = rng.standard_normal(params.n)
    if alternative:
        planted = rng.random(params.n) < params.epsilon
        x += np.where(planted, params.mu, params.a)
    return x


def _agg_rep(task):
    params, gamma0, alternative, seed = task
    x = aggregate_scores(params, np.random.default_rng(seed), alternative)
    return hc_star_array(clip_pvalues(ndtr(-x)), gamma0)[0], float(np.dot(x, x))


def aggregate_experiment(
    params, level=DEFAULT_LEVEL, reps=DEFAULT_REPS, seed=0, gamma0=0.1, cal_reps=DEFAULT_CAL_REPS, workers=1
):
    """HC on one-sided P-values versus the sum-of-squares statistic.

    Returns ``(hc, chisq)`` estimates; both thresholds come from null
    Monte Carlo.
    """
    def run(stream, alternative, count):
        tasks = [(params, gamma0, alternative, s) for s in _seeds(seed, stream, 0, count)]
        return np.array(map_replicates(_agg_rep, tasks, workers)).reshape(count, 2)

    cal = run(rngmod.AGG_CALIBRATION, False, cal_reps)
    null = run(rngmod.AGG_NULL, False, reps)
    alt = run(rngmod.AGG_ALT, True, reps)
    out = []
    for j, variant in enumerate(("hc", "chisq")):
        thr = _quantile_threshold(cal[:, j], level)
        t1, t2 = error_rates(null[:, j], alt[:, j], thr)
        out.append(
            PowerEstimate(
                params.beta, params.r, params.n, reps, thr, level, t1, t2, t1 + t2,
                _se(t1, t2, reps, reps), best_error_sum(null[:, j], alt[:, j]), int(seed), variant,
            )
        )
    return tuple(out)
