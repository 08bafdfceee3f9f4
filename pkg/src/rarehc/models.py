"""Rare/weak model families, their tail exponents and P-value samplers."""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np
from scipy.special import ndtr

from .errors import DomainError

__all__ = [
    "Family",
    "ModelSpec",
    "RareWeakParams",
    "PValueSample",
    "alpha",
    "sample_h0",
    "sample_h1",
    "sample_nonnull",
    "clip_pvalues",
    "P_EPS",
]

P_EPS = np.finfo(np.float64).eps
LOG2 = math.log(2.0)


class Family(str, Enum):
    NORMAL_MEANS = "normal-means"
    TWO_SAMPLE_NORMAL = "two-sample-normal"
    SMALL_POISSON = "small-poisson"
    HETEROSCEDASTIC = "heteroscedastic"


SAMPLED_FAMILIES = frozenset({Family.NORMAL_MEANS, Family.HETEROSCEDASTIC})


@dataclass(frozen=True)
class ModelSpec:
    """Which family governs the non-null tail, plus its variance parameter.

    ``sigma2`` only matters for the heteroscedastic family; the other
    families require it to stay at 1.
    """

    family: Family = Family.NORMAL_MEANS
    sigma2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")
        if self.family is not Family.HETEROSCEDASTIC and self.sigma2 != 1.0:
            raise DomainError("sigma2 is only configurable for the heteroscedastic family")

    @property
    def sampled(self):
        return self.family in SAMPLED_FAMILIES

    def alpha(self, q, r):
        return alpha(self, q, r)

    def __str__(self):
        if self.family is Family.HETEROSCEDASTIC:
            return f"{self.family.value}(sigma2={self.sigma2:g})"
        return self.family.value


@dataclass(frozen=True)
class RareWeakParams:
    """Calibration bundle: ``eps_n = n**-beta`` and ``mu_n = sqrt(2 r log n)``."""

    n: int
    beta: float
    r: float
    gamma0: float = 0.1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not 0.5 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (1/2, 1), got {self.beta}")
        # r = 0 is accepted as the no-signal limit
        if not self.r >= 0:
            raise DomainError(f"r must be non-negative, got {self.r}")
        if not 0.0 < self.gamma0 < 1.0:
            raise DomainError(f"gamma0 must lie in (0, 1), got {self.gamma0}")

    @property
    def epsilon(self):
        return float(self.n) ** (-self.beta)

    @property
    def mu(self):
        return math.sqrt(2.0 * self.r * math.log(self.n))


@dataclass
class PValueSample:
    """``n`` P-values plus the (0-based) indices that carry the non-null law."""

    pvalues: np.ndarray
    planted: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __post_init__(self):
        self.pvalues = np.asarray(self.pvalues, dtype=np.float64)
        self.planted = np.asarray(self.planted, dtype=np.int64)
        if self.pvalues.ndim != 1:
            raise DomainError("pvalues must be one-dimensional")

    @property
    def n(self):
        return self.pvalues.size

    def validate(self):
        p = self.pvalues
        if not np.all((p > 0.0) & (p < 1.0)):
            bad = int(np.flatnonzero(~((p > 0.0) & (p < 1.0)))[0])
            raise DomainError(f"P-value at position {bad} is {p[bad]!r}, outside (0, 1)")
        pl = self.planted
        if pl.size:
            if pl.min() < 0 or pl.max() >= p.size:
                raise DomainError("planted index out of range")
            if np.unique(pl).size != pl.size:
                raise DomainError("planted indices must be distinct")
        return self


def _check_qr(q, r):
    q = np.asarray(q, dtype=np.float64)
    if np.any(~((q > 0.0) & (q <= 1.0))):
        raise DomainError(f"q must lie in (0, 1], got {q if q.ndim == 0 else 'array'}")
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    return q


def alpha(model, q, r):
    """Tail exponent of the non-null P-value at scale ``n**-q``.

    Vectorised over ``q``.  Below the point where the non-null P-value is
    no longer scarce the exponent is floored at 0.
    """
    qa = _check_qr(q, r)
    fam = model.family
    if fam is Family.NORMAL_MEANS:
        out = np.where(qa > r, (np.sqrt(qa) - math.sqrt(r)) ** 2, 0.0)
    elif fam is Family.TWO_SAMPLE_NORMAL:
        out = np.where(qa > r / 2, (np.sqrt(qa) - math.sqrt(r / 2)) ** 2, 0.0)
    elif fam is Family.HETEROSCEDASTIC:
        out = np.where(qa > r, (np.sqrt(qa) - math.sqrt(r)) ** 2 / model.sigma2, 0.0)
    elif fam is Family.SMALL_POISSON:
        # the raw expression has its zero minimum at q = r log(2) / 2
        q0 = r * LOG2 / 2
        safe = np.maximum(qa, q0)
        raw = safe * (np.log(2 * safe / (r * LOG2)) - 1) / LOG2 + r / 2
        out = np.where(qa > q0, np.maximum(raw, 0.0), 0.0)
    else:  # pragma: no cover
        raise DomainError(f"unknown family {fam!r}")
    return float(out) if out.ndim == 0 else out


def clip_pvalues(p):
    return np.clip(p, P_EPS, 1.0 - P_EPS)


def sample_h0(n, rng):
    """``n`` iid Unif(0,1) P-values."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return PValueSample(clip_pvalues(rng.random(int(n))))


def sample_nonnull(model, mu, size, rng):
    """Draws from the non-null P-value law: survival of a shifted normal."""
    if not model.sampled:
        raise DomainError(f"no P-value sampler for family {model.family.value}")
    z = mu + math.sqrt(model.sigma2) * rng.standard_normal(size)
    return clip_pvalues(ndtr(-z))


def draw_planted(n, eps, rng):
    """Planted index set: each index independently with probability ``eps``."""
    m = rng.binomial(n, eps)
    idx = rng.choice(n, size=m, replace=False) if m else np.empty(0, dtype=np.int64)
    return np.sort(idx).astype(np.int64)


def sample_h1(params, model, rng):
    """One P-value sample from the rare/weak mixture alternative."""
    if not model.sampled:
        raise DomainError(f"no P-value sampler for family {model.family.value}")
    n = params.n
    p = rng.random(n)
    planted = draw_planted(n, params.epsilon, rng)
    p[planted] = sample_nonnull(model, params.mu, planted.size, rng)
    return PValueSample(clip_pvalues(p), planted)
