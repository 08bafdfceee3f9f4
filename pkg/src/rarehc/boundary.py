"""The HC impossibility curve rho(beta), solved numerically and in closed form.

rho(beta) is the largest r for which

    max_{q in (0, 1]} (1 + q)/2 - alpha(q, r) - beta  <  0.

The inner maximisation uses a coarse grid followed by golden-section
refinement on the bracketing cell; the outer problem is bisection on r.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import BracketError, DomainError
from .models import Family, ModelSpec, alpha

__all__ = [
    "Method",
    "InnerMaxResult",
    "BoundaryPoint",
    "BoundaryCurve",
    "golden_section_max",
    "inner_max",
    "rho",
    "rho_point",
    "tilde_rho_normal",
    "closed_form_rho",
    "boundary_curve",
    "Q_MIN",
    "GRID_POINTS",
]

Q_MIN = 1e-4
GRID_POINTS = 512
R_CAP_EXP = 10
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Method(str, Enum):
    NUMERIC = "Numeric"
    CLOSED_FORM = "ClosedForm"


@dataclass(frozen=True)
class InnerMaxResult:
    value: float
    argmax_q: float


@dataclass(frozen=True)
class BoundaryPoint:
    beta: float
    rho: float
    argmax_q: float
    certificate_lo: float  # inner max at rho - tol, expected < 0
    certificate_hi: float  # inner max at rho + tol, expected >= 0
    zero: bool = False  # rho pinned at 0: even r -> 0+ is not powerless


@dataclass
class BoundaryCurve:
    model: ModelSpec
    betas: list
    rhos: list
    method: Method = Method.NUMERIC
    points: list = field(default_factory=list)


def golden_section_max(f, a, b, tol=1e-12, max_iter=200):
    """Maximise a function on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _check_beta(beta):
    if not 0.5 < beta < 1.0:
        raise DomainError(f"beta must lie in (1/2, 1), got {beta}")


def inner_max(model, beta, r, q_min=Q_MIN, grid_points=GRID_POINTS):
    """Maximise ``(1+q)/2 - alpha(q, r) - beta`` over ``q`` in ``[q_min, 1]``."""
    _check_beta(beta)
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    if not 0.0 < q_min < 1.0:
        raise DomainError(f"q_min must lie in (0, 1), got {q_min}")

    def f(q):
        return (1.0 + q) / 2.0 - alpha(model, q, r) - beta

    qs = np.linspace(q_min, 1.0, grid_points)
    vals = (1.0 + qs) / 2.0 - alpha(model, qs, r) - beta
    k = int(np.argmax(vals))
    best_q, best_v = float(qs[k]), float(vals[k])
    lo, hi = qs[max(k - 1, 0)], qs[min(k + 1, grid_points - 1)]
    q_ref, v_ref = golden_section_max(f, float(lo), float(hi))
    if v_ref > best_v:
        best_q, best_v = q_ref, v_ref
    return InnerMaxResult(best_v, best_q)


def rho_point(model, beta, tol=1e-6, q_min=Q_MIN):
    """Boundary point at ``beta`` with its sign-change certificate."""
    _check_beta(beta)
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")

    def g(r):
        return inner_max(model, beta, r, q_min).value

    r_tiny = 2.0 ** -40
    if g(r_tiny) >= 0:
        v = inner_max(model, beta, r_tiny, q_min)
        return BoundaryPoint(beta, 0.0, v.argmax_q, -math.inf, v.value, zero=True)

    lo, hi = 0.0, None
    for e in range(-20, R_CAP_EXP + 1):
        r = 2.0 ** e
        if g(r) >= 0:
            hi = r
            break
        lo = r
    if hi is None:
        raise BracketError(f"no sign change below r = 2**{R_CAP_EXP} for {model} at beta={beta}")

    while hi - lo > tol:
        mid = (lo + hi) / 2
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    rho_val = (lo + hi) / 2
    at = inner_max(model, beta, rho_val, q_min)
    c_lo = g(rho_val - tol) if rho_val - tol > 0 else -math.inf
    c_hi = g(rho_val + tol)
    return BoundaryPoint(beta, rho_val, at.argmax_q, c_lo, c_hi)


def rho(model, beta, tol=1e-6, q_min=Q_MIN):
    return rho_point(model, beta, tol, q_min).rho


def tilde_rho_normal(beta):
    """Closed-form boundary for the normal-means family.

    ``beta - 1/2`` below 3/4 and ``(1 - sqrt(1 - beta))**2`` from 3/4 on;
    the two branches meet at 1/4.
    """
    _check_beta(beta)
    if beta < 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def closed_form_rho(model, beta):
    if model.family is not Family.NORMAL_MEANS:
        raise DomainError(f"no closed form for {model}")
    return tilde_rho_normal(beta)


def boundary_curve(model, betas, tol=1e-6, q_min=Q_MIN, method=Method.NUMERIC):
    method = Method(method)
    betas = [float(b) for b in betas]
    if method is Method.CLOSED_FORM:
        rhos = [closed_form_rho(model, b) for b in betas]
        points = []
        for b, r in zip(betas, rhos):
            argq = min(1.0, 4.0 * r) if r > 0 else q_min
            points.append(BoundaryPoint(b, r, argq, math.nan, math.nan))
        return BoundaryCurve(model, betas, rhos, method, points)
    points = [rho_point(model, b, tol, q_min) for b in betas]
    return BoundaryCurve(model, betas, [p.rho for p in points], method, points)
