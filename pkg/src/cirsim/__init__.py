"""Adaptive, positivity-preserving simulation of the Cox-Ingersoll-Ross process."""

__version__ = "0.1.0"

from .adaptive import (
    Provenance,
    StepState,
    StepStrategy,
    StrategyKind,
    Trajectory,
    hybrid_advance,
    simulate,
    step_size,
)
from .driver import PathDriver
from .experiments import (
    ConvergenceRow,
    StrategyTemplate,
    SweepRow,
    fit_order,
    reference_solution,
    run_convergence,
    run_sweep,
)
from .model import CirModel, ParameterError, drift, exact_mean, exact_variance, make_model
from .positivity import PositivityQuery, g_function, hmax_bound, one_step_neg_prob
from .schemes import EulerVariant, backstop_map, euler_variant_step, explicit_map, sia_map

__all__ = [
    "__version__",
    "CirModel",
    "ConvergenceRow",
    "EulerVariant",
    "ParameterError",
    "PathDriver",
    "PositivityQuery",
    "Provenance",
    "StepState",
    "StepStrategy",
    "StrategyKind",
    "StrategyTemplate",
    "SweepRow",
    "Trajectory",
    "backstop_map",
    "drift",
    "euler_variant_step",
    "exact_mean",
    "exact_variance",
    "explicit_map",
    "fit_order",
    "g_function",
    "hmax_bound",
    "hybrid_advance",
    "make_model",
    "one_step_neg_prob",
    "reference_solution",
    "run_convergence",
    "run_sweep",
    "sia_map",
    "simulate",
    "step_size",
]
