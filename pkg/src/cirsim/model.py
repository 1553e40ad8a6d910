"""Cox-Ingersoll-Ross model parameters, square-root transform, and moment oracles.

The CIR short-rate / variance process is

    dX(t) = kappa * (lambda - X(t)) dt + sigma * sqrt(X(t)) dW(t),   X(0) = x0 > 0.

Substituting Y = sqrt(X) turns the state-dependent diffusion into a constant one
at the price of a drift singularity at zero:

    dY(t) = (alpha / Y(t) + beta * Y(t)) dt + gamma dW(t)

with alpha = (4*kappa*lambda - sigma^2) / 8, beta = -kappa / 2, gamma = sigma / 2.
Every simulation scheme in this package works in one of these two coordinate
systems, so the model value carries both parameter sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path


class ParameterError(ValueError):
    """Raised when CIR parameters fall outside their admissible domain."""


@dataclass(frozen=True)
class CirModel:
    """Immutable bundle of original and transformed CIR parameters.

    Attributes
    ----------
    kappa, lam, sigma, x0 : original parameters (all strictly positive)
    alpha, beta, gamma    : transformed drift/diffusion coefficients
    y0                    : sqrt(x0), initial value in transformed coordinates
    a                     : sigma^2 / (2*kappa*lam), the regime classifier
    """

    kappa: float
    lam: float
    sigma: float
    x0: float
    alpha: float
    beta: float
    gamma: float
    y0: float
    a: float

    @property
    def assumption_2_1(self) -> bool:
        """True when kappa*lam > 2*sigma^2 (equivalently a < 1/4)."""
        return self.a < 0.25

    @property
    def feller(self) -> bool:
        """True when 2*kappa*lam >= sigma^2 (equivalently a <= 1)."""
        return self.a <= 1.0


def make_model(kappa: float, lam: float, sigma: float, x0: float) -> CirModel:
    """Validate parameters and populate the derived transformed coefficients."""
    for name, value in (("kappa", kappa), ("lambda", lam), ("sigma", sigma), ("x0", x0)):
        value = float(value)
        if not math.isfinite(value) or value <= 0.0:
            raise ParameterError(f"{name} must be strictly positive and finite, got {value!r}")
    kappa, lam, sigma, x0 = float(kappa), float(lam), float(sigma), float(x0)
    return CirModel(
        kappa=kappa,
        lam=lam,
        sigma=sigma,
        x0=x0,
        alpha=(4.0 * kappa * lam - sigma * sigma) / 8.0,
        beta=-kappa / 2.0,
        gamma=sigma / 2.0,
        y0=math.sqrt(x0),
        a=sigma * sigma / (2.0 * kappa * lam),
    )


def drift(model: CirModel, y):
    """Transformed drift f(y) = alpha/y + beta*y. Accepts scalars or arrays; y must be nonzero."""
    import numpy as np

    if np.any(np.asarray(y) == 0.0):
        raise ParameterError("drift is singular at y = 0")
    return model.alpha / y + model.beta * y


def exact_mean(model: CirModel, t: float) -> float:
    """Conditional mean E[X(t) | X(0) = x0] = lam + (x0 - lam) * exp(-kappa t)."""
    if t < 0.0:
        raise ParameterError(f"t must be nonnegative, got {t!r}")
    e = math.exp(-model.kappa * t)
    return model.x0 * e + model.lam * (1.0 - e)


def exact_variance(model: CirModel, t: float) -> float:
    """Conditional variance of X(t) given X(0) = x0.

    Var[X(t)] = x0 sigma^2/kappa (e^{-kt} - e^{-2kt}) + lam sigma^2/(2 kappa) (1 - e^{-kt})^2,
    which tends to lam*sigma^2/(2*kappa) as t grows.
    """
    if t < 0.0:
        raise ParameterError(f"t must be nonnegative, got {t!r}")
    e = math.exp(-model.kappa * t)
    s2k = model.sigma * model.sigma / model.kappa
    return model.x0 * s2k * (e - e * e) + 0.5 * model.lam * s2k * (1.0 - e) ** 2


_PARAM_KEYS = {"kappa", "lambda", "sigma", "x0"}


def read_param_file(path: str | Path) -> dict[str, float]:
    """Read model parameters from a plain-text ``key=value`` file.

    Recognised keys: kappa, lambda, sigma, x0. Blank lines and lines starting
    with '#' are ignored. Values are validated by the caller via make_model.
    """
    params: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _PARAM_KEYS:
            raise ParameterError(f"{path}:{lineno}: unknown parameter {key!r}")
        try:
            params[key] = float(value.strip())
        except ValueError as exc:
            raise ParameterError(f"{path}:{lineno}: bad number {value.strip()!r}") from exc
    return params
