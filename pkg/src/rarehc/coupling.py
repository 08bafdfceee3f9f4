"""Paired null/alternative P-value samples that share randomness off the planted set.

Off the planted set both samples hold the same uniform; on it the null
sample gets a fresh uniform and the alternative a fresh non-null draw.
The diagnostics here track the quantities that make HC blind to the
difference: the smallest planted value, the null value just below it,
and the weighted CDF-difference bound on ``hc1 - hc0``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import stats

from . import kernels, rng as rngmod
from .errors import DomainError
from .hc import hc_star_array, imax_for
from .models import ModelSpec, RareWeakParams, clip_pvalues, draw_planted, sample_nonnull
from .parallel import map_replicates

__all__ = [
    "CoupledDraw",
    "DeltaDiagnostics",
    "GapEstimate",
    "coupled_sample",
    "lemma4_t1",
    "lemma4_check",
    "coupling_diagnostics",
    "hc_gap_probability",
    "min_spacing_scaled",
    "spacing_law_check",
    "spacing_tail_probability",
    "T1_CAP",
]

T1_CAP = 0.499
SLACK = 1e-9


@dataclass
class CoupledDraw:
    q0: np.ndarray
    q1: np.ndarray
    planted: np.ndarray
    m: int
    qbar_minus: float  # smallest planted value across both samples (inf if none planted)
    q_minus: float  # smallest value across both samples
    q_plus: float | None  # largest null value strictly below qbar_minus

    @classmethod
    def from_arrays(cls, q0, q1, planted):
        q0 = np.asarray(q0, dtype=np.float64)
        q1 = np.asarray(q1, dtype=np.float64)
        planted = np.asarray(planted, dtype=np.int64)
        return cls(q0, q1, planted, *_summarise(q0, q1, planted))

    @property
    def n(self):
        return self.q0.size

    @property
    def ordering_ok(self):
        return self.q_minus < self.qbar_minus


@dataclass
class DeltaDiagnostics:
    hc0: float
    hc1: float
    sup_bound: float | None
    ordering_ok: bool
    bound_ok: bool | None  # None when the bound does not apply (q_plus undefined)
    t1: float
    # bound over the wider interval [qbar_minus, t1], kept for comparison
    sup_bound_qbar: float | None = None


def _summarise(q0, q1, planted):
    m = int(planted.size)
    q_minus = float(min(q0.min(), q1.min()))
    if m:
        qbar = float(min(q0[planted].min(), q1[planted].min()))
    else:
        qbar = math.inf
    below = q0[q0 < qbar]
    q_plus = float(below.max()) if below.size else None
    return m, qbar, q_minus, q_plus


def coupled_sample(params, model, rng):
    """One coupled draw (H0 sample, H1 sample) on a common probability space."""
    if not model.sampled:
        raise DomainError(f"no P-value sampler for family {model.family.value}")
    n = params.n
    u = clip_pvalues(rng.random(n))
    planted = draw_planted(n, params.epsilon, rng)
    q0 = u
    q1 = u.copy()
    q0[planted] = clip_pvalues(rng.random(planted.size))
    q1[planted] = sample_nonnull(model, params.mu, planted.size, rng)
    m, qbar, q_minus, q_plus = _summarise(q0, q1, planted)
    return CoupledDraw(q0, q1, planted, m, qbar, q_minus, q_plus)


def lemma4_t1(n, gamma0):
    """Upper end of the bound interval: the HC truncation position, capped below 1/2."""
    return min(imax_for(n, gamma0) / n, T1_CAP)


def lemma4_check(draw, gamma0=0.1, slack=SLACK):
    """Check ``hc1 - hc0 <= sup_{[q_plus, t1]} sqrt(n) (F1 - F0) w`` on one draw."""
    n = draw.n
    hc0, _ = hc_star_array(draw.q0, gamma0)
    hc1, _ = hc_star_array(draw.q1, gamma0)
    t1 = lemma4_t1(n, gamma0)
    ordering = draw.ordering_ok
    if draw.m == 0:
        # identical samples: the difference process vanishes everywhere
        return DeltaDiagnostics(hc0, hc1, 0.0, ordering, hc1 - hc0 <= slack, t1, 0.0)
    if not ordering or draw.q_plus is None:
        return DeltaDiagnostics(hc0, hc1, None, ordering, None, t1)
    s0 = np.sort(draw.q0)
    s1 = np.sort(draw.q1)
    lo = draw.q_plus
    sup = kernels.weighted_sup_sorted(s0, s1, lo, t1, n) if lo <= t1 else 0.0
    qb = draw.qbar_minus
    sup_qbar = kernels.weighted_sup_sorted(s0, s1, qb, t1, n) if qb <= t1 else 0.0
    return DeltaDiagnostics(hc0, hc1, sup, ordering, hc1 - hc0 <= sup + slack, t1, sup_qbar)


def _coupling_rep(task):
    params, model, gamma0, seed = task
    draw = coupled_sample(params, model, np.random.default_rng(seed))
    d = lemma4_check(draw, gamma0)
    return {
        "seed": seed,
        "n": params.n,
        "beta": params.beta,
        "r": params.r,
        "m": draw.m,
        "hc0": d.hc0,
        "hc1": d.hc1,
        "sup_bound": d.sup_bound,
        "ordering_ok": bool(d.ordering_ok),
        "bound_ok": d.bound_ok,
        "qbar_minus": draw.qbar_minus if math.isfinite(draw.qbar_minus) else None,
        "q_plus": draw.q_plus,
        "sup_bound_qbar": d.sup_bound_qbar,
    }


def coupling_diagnostics(params, model, draws, seed, workers=1, cell=0):
    """Per-draw diagnostic records for ``draws`` coupled samples."""
    tasks = [
        (params, model, params.gamma0, rngmod.substream_seed(seed, rngmod.COUPLING, cell, i)) for i in range(draws)
    ]
    return map_replicates(_coupling_rep, tasks, workers)


@dataclass(frozen=True)
class GapEstimate:
    probability: float
    se: float
    reps: int
    n: int

    def __float__(self):
        return self.probability


def _gap_rep(task):
    params, model, c, seed = task
    draw = coupled_sample(params, model, np.random.default_rng(seed))
    hc0, _ = hc_star_array(draw.q0, params.gamma0)
    hc1, _ = hc_star_array(draw.q1, params.gamma0)
    return hc1 > hc0 + c


def hc_gap_probability(params, model, c, reps, seed, workers=1, cell=0):
    """Monte Carlo estimate of ``Pr(hc1 > hc0 + c)`` under the coupling."""
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    if reps < 1:
        raise DomainError("reps must be at least 1")
    tasks = [(params, model, c, rngmod.substream_seed(seed, rngmod.COUPLING, cell, i)) for i in range(reps)]
    hits = np.array(map_replicates(_gap_rep, tasks, workers), dtype=bool)
    p = float(hits.mean())
    return GapEstimate(p, math.sqrt(p * (1 - p) / reps), reps, params.n)


def min_spacing_scaled(n, reps, rng):
    """``n (n+1) min_i S_i`` for ``reps`` uniform samples of size ``n``.

    Spacings include the two end gaps to 0 and 1.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    out = np.empty(reps)
    for k in range(reps):
        out[k] = kernels.min_spacing_sorted(np.sort(rng.random(n)))
    return n * (n + 1) * out


def spacing_law_check(n, reps, rng):
    """KS distance between scaled minimum spacings and Exp(1); NaN for n < 2."""
    if n < 2:
        return math.nan
    x = min_spacing_scaled(n, reps, rng)
    return float(stats.kstest(x, "expon").statistic)


def spacing_tail_probability(n, x, reps, rng):
    """Empirical ``Pr(n (n+1) min S_i > x)`` with its binomial SE."""
    s = min_spacing_scaled(n, reps, rng)
    p = float(np.mean(s > x))
    return p, math.sqrt(p * (1 - p) / reps)

