"""Higher Criticism for rare/weak sparse mixtures: statistic, impossibility
boundary, coupling diagnostics and Monte Carlo power experiments."""

__version__ = "0.1.0"

from .boundary import BoundaryCurve, inner_max, rho, tilde_rho_normal
from .errors import BracketError, DomainError
from .hc import HCEvaluation, hc_components, hc_star, weighted_sup_delta
from .models import Family, ModelSpec, PValueSample, RareWeakParams, alpha, sample_h0, sample_h1

__all__ = [
    "BoundaryCurve",
    "BracketError",
    "DomainError",
    "Family",
    "HCEvaluation",
    "ModelSpec",
    "PValueSample",
    "RareWeakParams",
    "alpha",
    "hc_components",
    "hc_star",
    "inner_max",
    "rho",
    "sample_h0",
    "sample_h1",
    "tilde_rho_normal",
    "weighted_sup_delta",
]
