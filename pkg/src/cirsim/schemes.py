"""One-step maps: transformed explicit/semi-implicit/drift-implicit schemes and
the classical Euler-Maruyama variants on the original coordinates.

All maps are pure functions of (state, Brownian increment, step size) and accept
scalars or numpy arrays interchangeably; the whole-trajectory drivers live in
``adaptive`` and ``experiments``. Keeping one shared implementation guarantees
that a batched simulation reproduces a scalar one bit-for-bit.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .model import CirModel


def explicit_map(model: CirModel, y, dw, h):
    """Explicit Euler step in square-root coordinates: y + h*(alpha/y + beta*y) + gamma*dw.

    The result may be negative; the hybrid controller decides whether to retake
    the step with the positivity-preserving map.
    """
    _require_positive_state(y, "explicit_map")
    return y + h * (model.alpha / y + model.beta * y) + model.gamma * dw


def sia_map(model: CirModel, y, dw, h):
    """Semi-implicit step: the beta*y term is taken implicitly, the singular term is not.

    (1 - beta*h)^-1 * (y + h*alpha/y + gamma*dw); may be negative.
    """
    _require_positive_state(y, "sia_map")
    return (y + h * (model.alpha / y) + model.gamma * dw) / (1.0 - model.beta * h)


def backstop_map(model: CirModel, y, dw, h):
    """Drift-implicit square-root step; strictly positive for any increment.

    Solves y' = y + h*(alpha/y' + beta*y') + gamma*dw in closed form:

        y' = (y + gamma*dw) / (2*(1 - beta*h)) + sqrt( (y + gamma*dw)^2 / (4*(1 - beta*h)^2)
                                                       + alpha*h / (1 - beta*h) )

    The radicand is positive whenever alpha > 0, beta < 0 and h > 0, so the
    output is positive almost surely regardless of how violent the shock dw is.
    When the linear part is negative the conjugate form c / (sqrt(...) - half)
    is used instead; the two are identical in exact arithmetic, but the direct
    sum cancels catastrophically exactly when the root is close to zero.
    """
    _require_positive_state(y, "backstop_map")
    if model.alpha <= 0.0:
        raise ValueError("backstop_map requires alpha > 0 (4*kappa*lambda > sigma^2)")
    den = 1.0 - model.beta * h
    half = (y + model.gamma * dw) / (2.0 * den)
    c = model.alpha * (h / den)
    root = np.sqrt(half * half + c)
    return np.where(half >= 0.0, half + root, c / (root - half))


class EulerVariant(Enum):
    """Rows of the classical Euler-Maruyama family on the original coordinates.

    Each variant is the quadruple (g0, g1, g2, g3) in

        x~' = g0(x) + h*kappa*(lam - g1(x)) + sigma*sqrt(g2(x))*dw,   output g3(x~')

    with g in {identity, positive part, absolute value} per row.
    """

    EXPLICIT_EULER = "EE"
    PARTIALLY_TRUNCATED = "PT"
    FULLY_TRUNCATED = "FT"
    HIGHAM_MAO = "HM"


def euler_variant_raw(model: CirModel, variant: EulerVariant, x, dw, h):
    """Pre-output update x~' for one variant step; this is the state that recurses."""
    x = np.asarray(x, dtype=np.float64) if not np.isscalar(x) else x
    if variant is EulerVariant.EXPLICIT_EULER:
        if np.any(np.asarray(x) < 0.0):
            raise ValueError("explicit Euler is undefined for negative states (sqrt of x < 0)")
        g1 = x
        g2 = x
    elif variant is EulerVariant.PARTIALLY_TRUNCATED:
        g1 = x
        g2 = np.maximum(x, 0.0)
    elif variant is EulerVariant.FULLY_TRUNCATED:
        g1 = np.maximum(x, 0.0)
        g2 = g1
    elif variant is EulerVariant.HIGHAM_MAO:
        g1 = x
        g2 = np.abs(x)
    else:  # pragma: no cover - exhaustive enum
        raise ValueError(f"unknown variant {variant!r}")
    return x + h * model.kappa * (model.lam - g1) + model.sigma * np.sqrt(g2) * dw


def euler_variant_output(variant: EulerVariant, x_raw):
    """Measured state g3(x~'): the positive part for the fully truncated row, identity otherwise."""
    if variant is EulerVariant.FULLY_TRUNCATED:
        return np.maximum(x_raw, 0.0)
    return x_raw


def euler_variant_step(model: CirModel, variant: EulerVariant, x, dw, h):
    """One observable step g3(x~'). Note that for the fully truncated variant the
    trajectory recursion runs on the raw value from euler_variant_raw, not on this output."""
    return euler_variant_output(variant, euler_variant_raw(model, variant, x, dw, h))


def _require_positive_state(y, where: str) -> None:
    if np.any(np.asarray(y) <= 0.0):
        raise ValueError(f"{where} requires a strictly positive state")
