"""Higher Criticism statistic over sorted P-values."""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import DomainError
from .models import PValueSample

__all__ = ["HCEvaluation", "weight", "imax_for", "hc_components", "hc_star", "hc_star_array", "weighted_sup_delta"]


@dataclass
class HCEvaluation:
    hc_star: float
    argmax_index: int  # 1-based position in the sorted sample
    n: int
    gamma0: float
    components: np.ndarray | None = None


def weight(t):
    """HC weight ``1 / sqrt(t (1 - t))``."""
    t = np.asarray(t, dtype=np.float64)
    return 1.0 / np.sqrt(t * (1.0 - t))


def imax_for(n, gamma0):
    """Number of leading order statistics HC maximises over (at least 1)."""
    return max(1, int(math.floor(n * gamma0)))


def _as_array(sample):
    p = sample.pvalues if isinstance(sample, PValueSample) else np.asarray(sample, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise DomainError("need a non-empty one-dimensional sample")
    if not np.all((p > 0.0) & (p < 1.0)):
        raise DomainError("P-values must lie strictly inside (0, 1)")
    return p


def _smallest_sorted(p, k):
    if k >= p.size:
        return np.sort(p, kind="stable")
    return np.sort(np.partition(p, k - 1)[:k], kind="stable")


def hc_components(sample):
    """All ``n`` HC components, indexed by sorted position."""
    p = _as_array(sample)
    return kernels.hc_components_sorted(np.sort(p, kind="stable"), p.size)


def hc_star_array(p, gamma0=0.1):
    """Fast path: ``(hc_star, argmax_index)`` of a validated float array."""
    n = p.size
    k = imax_for(n, gamma0)
    value, arg = kernels.hc_scan(_smallest_sorted(p, k), n, k)
    return value, arg + 1


def hc_star(sample, gamma0=0.1, keep_components=False):
    if not 0.0 < gamma0 < 1.0:
        raise DomainError(f"gamma0 must lie in (0, 1), got {gamma0}")
    p = _as_array(sample)
    n = p.size
    if keep_components:
        comps = kernels.hc_components_sorted(np.sort(p, kind="stable"), n)
        k = imax_for(n, gamma0)
        arg = int(np.argmax(comps[:k]))
        return HCEvaluation(float(comps[arg]), arg + 1, n, gamma0, comps)
    value, arg = hc_star_array(p, gamma0)
    return HCEvaluation(value, arg, n, gamma0)


def weighted_sup_delta(sample0, sample1, t_lo, t_hi):
    """Supremum of ``sqrt(n) (F1 - F0)(t) w(t)`` over ``t`` in ``[t_lo, t_hi]``.

    ``F0``, ``F1`` are the right-continuous empirical CDFs.  The difference
    is piecewise constant, so the supremum is read off the segment
    endpoints between consecutive jumps; it is exact, no grid involved.
    """
    s0 = np.sort(_as_array(sample0))
    s1 = np.sort(_as_array(sample1))
    if s0.size != s1.size:
        raise DomainError("samples must have equal length")
    if not 0.0 < t_lo <= t_hi < 1.0:
        raise DomainError(f"need 0 < t_lo <= t_hi < 1, got [{t_lo}, {t_hi}]")
    return kernels.weighted_sup_sorted(s0, s1, t_lo, t_hi, s0.size)
