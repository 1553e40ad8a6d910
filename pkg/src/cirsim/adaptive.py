"""Adaptive timestepping: path-bounded step-size rules and the hybrid controller.

The step rule shrinks the step as the transformed state approaches the drift
singularity at zero (and, in the two-sided form, as it grows large):

    one-sided:  h = max(h_min, h_max * min(1, |y|^r))
    two-sided:  h = max(h_min, h_max * min(|y|^r, |y|^-r))

with h_max = rho * h_min. Whenever a step is taken strictly above the floor the
state is confined to [Q, R) with Q = rho^(-1/r) and R = rho^(1/r) (R infinite
for the one-sided rule).

Each step first proposes the explicit (or semi-implicit) update. At the floor
the drift-implicit map is used unconditionally; off the floor a nonpositive
proposal is retaken with the drift-implicit map reusing the same step length
and the same Brownian increment, so the trajectory stays on the common path
without bridging or discarding samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Callable, NamedTuple

import numpy as np

from .driver import PathDriver
from .model import CirModel
from .schemes import backstop_map, explicit_map, sia_map


class StrategyKind(Enum):
    ONE_SIDED = "one-sided"
    TWO_SIDED = "two-sided"


class Provenance(IntEnum):
    """How a step's state update was produced."""

    EXPLICIT = 0
    BACKSTOP_FLOOR = 1
    BACKSTOP_RETAKE = 2


@dataclass(frozen=True)
class StepStrategy:
    """Path-bounded step-size rule with a fixed h_max / h_min ratio rho."""

    kind: StrategyKind
    r: int
    h_max: float
    rho: int

    def __post_init__(self):
        if self.kind not in (StrategyKind.ONE_SIDED, StrategyKind.TWO_SIDED):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if not (isinstance(self.r, int) and self.r >= 1):
            raise ValueError(f"r must be an integer >= 1, got {self.r!r}")
        rho = self.rho
        if rho != int(rho) or int(rho) < 2 or (int(rho) & (int(rho) - 1)) != 0:
            raise ValueError(f"rho must be a power of two > 1, got {rho!r}")
        object.__setattr__(self, "rho", int(rho))
        if not (0.0 < self.h_max <= 1.0 and math.isfinite(self.h_max)):
            raise ValueError(f"h_max must lie in (0, 1], got {self.h_max!r}")

    @property
    def h_min(self) -> float:
        return self.h_max / self.rho

    @property
    def Q(self) -> float:
        """Lower state bound on non-floor steps."""
        return self.rho ** (-1.0 / self.r)

    @property
    def R(self) -> float:
        """Upper state bound on non-floor steps (infinite for the one-sided rule)."""
        return self.rho ** (1.0 / self.r) if self.kind is StrategyKind.TWO_SIDED else math.inf


class StepState(NamedTuple):
    t_ticks: int
    y: float


class StepResult(NamedTuple):
    state: StepState
    h: float
    dw: float
    provenance: Provenance


def exact_ticks(value: float, tick: float) -> int:
    """Number of ticks in ``value``; raises unless value is an exact tick multiple."""
    n = int(round(value / tick))
    if n * tick != value:
        raise ValueError(f"{value!r} is not an integer multiple of the tick {tick!r}")
    return n


def step_ticks(strategy: StepStrategy, y, tick: float):
    """Selected step in ticks: rounded down to the lattice, clamped to [h_min, h_max]."""
    ay = np.abs(y)
    p = ay**strategy.r
    if strategy.kind is StrategyKind.ONE_SIDED:
        m = np.minimum(1.0, p)
    else:
        m = np.minimum(p, 1.0 / p)
    hmax_tk = exact_ticks(strategy.h_max, tick)
    hmin_tk = exact_ticks(strategy.h_min, tick)
    return np.clip(np.floor(hmax_tk * m), hmin_tk, hmax_tk).astype(np.int64)


def step_size(strategy: StepStrategy, y, tick: float):
    """Selected step length in time units (a tick multiple in [h_min, h_max])."""
    return step_ticks(strategy, y, tick) * tick


def _advance_arrays(
    model: CirModel,
    strategy: StepStrategy,
    t_ticks,
    y,
    increment_fn: Callable,
    tick: float,
    total_ticks: int,
    core: Callable = explicit_map,
):
    """One hybrid step over scalars or parallel path arrays.

    The final step is truncated to land on the horizon exactly; a truncated
    step at or below the floor routes through the drift-implicit map like any
    floor step.
    """
    hmin_tk = exact_ticks(strategy.h_min, tick)
    h_tk = np.minimum(step_ticks(strategy, y, tick), total_ticks - t_ticks)
    dw = increment_fn(t_ticks, t_ticks + h_tk)
    h = h_tk * tick
    at_floor = h_tk <= hmin_tk
    y_backstop = backstop_map(model, y, dw, h)
    y_core = core(model, y, dw, h)
    retake = ~at_floor & (y_core <= 0.0)
    y_next = np.where(at_floor | retake, y_backstop, y_core)
    prov = np.where(
        at_floor,
        np.int64(Provenance.BACKSTOP_FLOOR),
        np.where(retake, np.int64(Provenance.BACKSTOP_RETAKE), np.int64(Provenance.EXPLICIT)),
    )
    return t_ticks + h_tk, y_next, h, dw, prov


def hybrid_advance(
    model: CirModel,
    strategy: StepStrategy,
    driver: PathDriver,
    state: StepState,
    core: Callable = explicit_map,
) -> StepResult:
    """Advance one state by one hybrid step on the driver's path."""
    if state.y <= 0.0:
        raise ValueError("hybrid_advance requires a positive state")
    if state.t_ticks >= driver.n_ticks:
        raise ValueError("state is already at the horizon")
    t2, y2, h, dw, prov = _advance_arrays(
        model,
        strategy,
        state.t_ticks,
        state.y,
        lambda a, b: driver.increment(int(a), int(b)),
        driver.tick,
        driver.n_ticks,
        core,
    )
    return StepResult(StepState(int(t2), float(y2)), float(h), float(dw), Provenance(int(prov)))


_CORE_MAPS = {"EA": explicit_map, "SIA": sia_map}


@dataclass
class Trajectory:
    """One simulated path: times t_0..t_N, steps h_1..h_N, states Y_0..Y_N."""

    times: np.ndarray
    steps: np.ndarray
    states: np.ndarray
    increments: np.ndarray
    provenance: np.ndarray

    @property
    def x_states(self) -> np.ndarray:
        """States mapped back to the original coordinates, X = Y^2."""
        return self.states**2

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def n_explicit(self) -> int:
        return int(np.sum(self.provenance == Provenance.EXPLICIT))

    @property
    def n_floor(self) -> int:
        return int(np.sum(self.provenance == Provenance.BACKSTOP_FLOOR))

    @property
    def n_retake(self) -> int:
        return int(np.sum(self.provenance == Provenance.BACKSTOP_RETAKE))


def simulate(
    model: CirModel,
    strategy: StepStrategy,
    driver: PathDriver,
    scheme: str = "EA",
) -> Trajectory:
    """Run the hybrid adaptive scheme over the driver's full horizon.

    ``scheme`` selects the non-floor core map: "EA" (explicit) or "SIA"
    (semi-implicit); the floor/retake logic is identical for both.
    """
    core = _CORE_MAPS[scheme]
    tick = driver.tick
    total = driver.n_ticks
    exact_ticks(strategy.h_max, tick)  # validates alignment, incl. h_min via rho
    exact_ticks(strategy.h_min, tick)
    inc = lambda a, b: driver.increment(int(a), int(b))  # noqa: E731

    t, y = 0, model.y0
    t_ticks = [0]
    steps, states, dws, prov = [], [model.y0], [], []
    while t < total:
        t2, y2, h, dw, p = _advance_arrays(model, strategy, t, y, inc, tick, total, core)
        t, y = int(t2), float(y2)
        t_ticks.append(t)
        steps.append(float(h))
        states.append(y)
        dws.append(float(dw))
        prov.append(int(p))
    return Trajectory(
        times=np.asarray(t_ticks, dtype=np.int64) * tick,
        steps=np.asarray(steps),
        states=np.asarray(states),
        increments=np.asarray(dws),
        provenance=np.asarray(prov, dtype=np.int8),
    )


def simulate_terminal_batch(
    model: CirModel,
    strategy: StepStrategy,
    lattice_matrix: np.ndarray,
    tick: float,
    scheme: str = "EA",
):
    """Terminal states and step counters for a block of paths, stepped in lockstep.

    ``lattice_matrix`` holds one quantized path per row (as produced by
    ``PathDriver.lattice_values``). Identical arithmetic to ``simulate``: the
    per-path results match the scalar loop bit-for-bit.

    Returns (y_T, n_steps, n_floor, n_retake) arrays over the block.
    """
    core = _CORE_MAPS[scheme]
    n_paths, width = lattice_matrix.shape
    total = width - 1
    exact_ticks(strategy.h_max, tick)
    exact_ticks(strategy.h_min, tick)

    t = np.zeros(n_paths, dtype=np.int64)
    y = np.full(n_paths, model.y0)
    n_steps = np.zeros(n_paths, dtype=np.int64)
    n_floor = np.zeros(n_paths, dtype=np.int64)
    n_retake = np.zeros(n_paths, dtype=np.int64)
    from .driver import LATTICE

    active = np.arange(n_paths)
    while active.size:

        def inc(a, b, rows=active):
            return (lattice_matrix[rows, b] - lattice_matrix[rows, a]) * LATTICE

        t2, y2, _, _, p = _advance_arrays(
            model, strategy, t[active], y[active], inc, tick, total, core
        )
        t[active] = t2
        y[active] = y2
        n_steps[active] += 1
        n_floor[active] += p == Provenance.BACKSTOP_FLOOR
        n_retake[active] += p == Provenance.BACKSTOP_RETAKE
        active = active[t2 < total]
    return y, n_steps, n_floor, n_retake
