"""Analytical positivity tooling for the hybrid adaptive scheme.

Two questions are answered without simulating anything. First, for a single
step of the one-sided rule from state y, the chance that the explicit update
overshoots zero:

    P[Y' < 0 | Y = y] = Phi(a(y)),
    a(y) = (-y - (alpha/y + beta*y) * h_max * min(1, y^r)) / (gamma * sqrt(h_max * min(1, y^r)))

Second, for two-sided rules (finite R), the largest h_max that keeps the
probability of ever needing the retake below a tolerance eps over the whole
horizon. That threshold is the right endpoint of the left-most interval on
which

    g(h) = Q/h + sqrt(h) * (alpha/(R*sqrt(rho)) + beta*R)
           - sqrt(-2*gamma^2 * ln(1 - (2*(1-eps)^(h/(rho*T)) - 1)^2))

stays positive; g blows up like Q/h near zero, so the interval is never empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from scipy.special import ndtr

from .adaptive import StepStrategy, StrategyKind
from .model import CirModel

#: exponent conventions for the survival term of g(h): "as-printed" uses
#: h/(rho*T); "nmax" uses 1/ceil(rho*T/h) (the integer worst-case step count).
GH_CONVENTIONS = ("as-printed", "nmax")


class GDomainError(ValueError):
    """The logarithm inside g(h) left its domain (distinct from a sign result)."""


class HmaxBound(NamedTuple):
    value: float
    saturated: bool


@dataclass(frozen=True)
class PositivityQuery:
    """Inputs of the whole-trajectory bound: model, two-sided strategy, tolerance, horizon."""

    model: CirModel
    strategy: StepStrategy
    epsilon: float
    horizon: float = 1.0
    convention: str = field(default="as-printed")

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive, got {self.horizon!r}")
        if not math.isfinite(self.strategy.R):
            raise ValueError("the trajectory bound needs a finite R (two-sided strategy)")
        if self.strategy.Q >= self.strategy.R:
            raise ValueError("strategy bounds must satisfy Q < R")
        if self.convention not in GH_CONVENTIONS:
            raise ValueError(f"convention must be one of {GH_CONVENTIONS}, got {self.convention!r}")


def one_step_neg_prob(model: CirModel, strategy: StepStrategy, y: float) -> float:
    """Probability that one explicit step of the one-sided rule from y goes negative."""
    if strategy.kind is not StrategyKind.ONE_SIDED:
        raise ValueError("the one-step overshoot probability is defined for one-sided rules only")
    if y <= strategy.h_min:
        raise ValueError(f"state must exceed h_min = {strategy.h_min!r}, got {y!r}")
    h = strategy.h_max * min(1.0, y**strategy.r)
    a = (-y - (model.alpha / y + model.beta * y) * h) / (model.gamma * math.sqrt(h))
    return float(ndtr(a))


def g_function(query: PositivityQuery, h: float) -> float:
    """Evaluate g(h); raises GDomainError if the log argument degenerates in floating point."""
    if not (0.0 < h < 1.0):
        raise ValueError(f"h must lie in (0, 1), got {h!r}")
    model, strategy = query.model, query.strategy
    rho_t = strategy.rho * query.horizon
    if query.convention == "as-printed":
        p = h / rho_t
    else:
        p = 1.0 / math.ceil(rho_t / h)
    # (1-eps)^p = 1 + u with u tiny and negative; then 1 - (2(1+u) - 1)^2 = -4u(1+u),
    # which evaluates accurately where the direct expression would cancel to zero.
    u = math.expm1(p * math.log1p(-query.epsilon))
    arg = -4.0 * u * (1.0 + u)
    if not (0.0 < arg <= 1.0):
        raise GDomainError(f"log argument {arg!r} outside (0, 1] at h = {h!r}")
    survival = math.sqrt(-2.0 * model.gamma**2 * math.log(arg))
    slope = model.alpha / (strategy.R * math.sqrt(strategy.rho)) + model.beta * strategy.R
    return strategy.Q / h + math.sqrt(h) * slope - survival


_SCAN_START = 1e-10
_H_SUP = 1.0 - 1e-12


def hmax_bound(query: PositivityQuery) -> HmaxBound:
    """Largest h_max below which g stays positive: geometric bracket, then bisection.

    Scans upward from 1e-10 by factors of two for the first sign change or
    domain exit, then bisects the bracket to a relative width of 1e-10. Returns
    (1.0, saturated=True) when g is positive on all of (0, 1).
    """

    def sign_ok(h: float) -> bool:
        try:
            return g_function(query, h) > 0.0
        except GDomainError:
            return False

    if not sign_ok(_SCAN_START):
        raise ArithmeticError("g is not positive at the scan origin; no positivity interval found")
    lo = _SCAN_START
    hi = None
    h = _SCAN_START
    while hi is None:
        h = min(h * 2.0, _H_SUP)
        if not sign_ok(h):
            hi = h
            break
        if h >= _H_SUP:
            return HmaxBound(1.0, True)
        lo = h

    while (hi - lo) > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if sign_ok(mid):
            lo = mid
        else:
            hi = mid
    return HmaxBound(0.5 * (lo + hi), False)
