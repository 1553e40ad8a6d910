"""Convergence, efficiency and parameter-sweep experiments on coupled paths.

Every scheme sees the same quantized Brownian paths through PathDriver, and the
error of each terminal value is measured against a per-path reference: the
drift-implicit map stepped on every fine tick. Fixed-step schemes run at the
mean adaptive step (rounded to ticks) so that methods are compared at equal
average cost.

Paths are processed in fixed-size blocks. All per-path quantities land in
arrays indexed by path, and summary statistics reduce over those full arrays,
so results are identical no matter how many worker threads process the blocks
or how the blocks are sized.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .adaptive import StepStrategy, StrategyKind, exact_ticks, simulate_terminal_batch
from .driver import LATTICE, PathDriver
from .model import CirModel, make_model
from .schemes import EulerVariant, backstop_map, euler_variant_output, euler_variant_raw

ADAPTIVE_SCHEMES = ("EA", "SIA")
FIXED_SCHEMES = ("IF", "EF", "FT")
SCHEME_ORDER = ADAPTIVE_SCHEMES + FIXED_SCHEMES

#: paths per processing block; a memory knob with no effect on any result
PATH_BLOCK = 64


@dataclass(frozen=True)
class StrategyTemplate:
    """Step-rule family; the convergence grid instantiates one strategy per h_max."""

    kind: StrategyKind = StrategyKind.ONE_SIDED
    r: int = 1
    rho: int = 64

    def instantiate(self, h_max: float) -> StepStrategy:
        return StepStrategy(self.kind, self.r, h_max, self.rho)


@dataclass
class ConvergenceRow:
    """One (scheme, step-size) experiment record."""

    scheme: str
    h_max: float
    h_mean: float
    rmse: float
    wall_seconds: float
    pct_retake: float
    pct_floor: float
    n_paths: int
    seed: int
    resolution_exp: int
    # step totals kept for downstream aggregation; not part of the CSV schema
    total_steps: int = field(default=0, repr=False)
    total_floor: int = field(default=0, repr=False)
    total_retake: int = field(default=0, repr=False)


@dataclass
class SweepRow:
    a: float
    sigma: float
    scheme: str
    order: float
    pct_retake: float
    pct_floor: float
    n_paths: int
    seed: int
    resolution_exp: int


@dataclass
class PositivityRow:
    rho: int
    Q: float
    R: float
    kappa: float
    lam: float
    sigma: float
    epsilon: float
    h_bar: float


def reference_solution(model: CirModel, driver: PathDriver) -> float:
    """Terminal X of the drift-implicit scheme stepped on every fine tick of one path."""
    x = _reference_terminal(model, driver.lattice_values()[None, :], driver.tick)
    return float(x[0])


def _reference_terminal(model: CirModel, lattice: np.ndarray, tick: float) -> np.ndarray:
    total = lattice.shape[1] - 1
    y = np.full(lattice.shape[0], model.y0)
    for i in range(total):
        dw = (lattice[:, i + 1] - lattice[:, i]) * LATTICE
        y = backstop_map(model, y, dw, tick)
    return y * y


def _fixed_terminal(
    model: CirModel, scheme: str, lattice: np.ndarray, tick: float, h_ticks: int
) -> np.ndarray:
    """Terminal X of a fixed-step scheme; the last step is truncated to hit the horizon."""
    total = lattice.shape[1] - 1
    bounds = list(range(0, total, h_ticks)) + [total]
    if scheme == "IF":
        state = np.full(lattice.shape[0], model.y0)
    else:
        state = np.full(lattice.shape[0], model.x0)
    variant = {"EF": EulerVariant.HIGHAM_MAO, "FT": EulerVariant.FULLY_TRUNCATED}.get(scheme)
    for a, b in zip(bounds[:-1], bounds[1:]):
        dw = (lattice[:, b] - lattice[:, a]) * LATTICE
        h = (b - a) * tick
        if scheme == "IF":
            state = backstop_map(model, state, dw, h)
        else:
            state = euler_variant_raw(model, variant, state, dw, h)
    if scheme == "IF":
        return state * state
    return np.asarray(euler_variant_output(variant, state))


def _block_ranges(n_paths: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + PATH_BLOCK, n_paths)) for lo in range(0, n_paths, PATH_BLOCK)]


def _lattice_block(seed: int, resolution_exp: int, horizon: float, lo: int, hi: int) -> np.ndarray:
    return np.stack(
        [PathDriver(seed, i, resolution_exp, horizon).lattice_values() for i in range(lo, hi)]
    )


def _map_blocks(tasks, threads: int):
    """Run block tasks, returning results in block order regardless of thread count."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda fn: fn(), tasks))
    return [fn() for fn in tasks]


def run_convergence(
    model: CirModel,
    strategy_template: StrategyTemplate,
    h_max_grid: Sequence[float],
    n_paths: int,
    *,
    seed: int,
    resolution_exp: int = 18,
    horizon: float = 1.0,
    threads: int = 1,
    record_timing: bool = True,
) -> list[ConvergenceRow]:
    """Coupled convergence experiment over a grid of h_max values.

    For each h_max the adaptive schemes run over all paths against the per-path
    fine-tick reference; the fixed-step schemes then run at the adaptive mean
    step rounded to the nearest tick (ties up). Returns one row per
    (h_max, scheme), schemes ordered EA, SIA, IF, EF, FT within each h_max.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    tick = horizon / (1 << resolution_exp)
    total_ticks = 1 << resolution_exp
    for h_max in h_max_grid:
        strat = strategy_template.instantiate(h_max)
        if exact_ticks(strat.h_max, tick) % strat.rho:
            raise ValueError(f"h_max {h_max!r} is not a tick multiple of rho*delta")
    blocks = _block_ranges(n_paths)

    x_ref = np.empty(n_paths)
    x_term = {(s, h): np.empty(n_paths) for s in ADAPTIVE_SCHEMES for h in h_max_grid}
    steps = {(s, h): np.empty(n_paths, dtype=np.int64) for s in ADAPTIVE_SCHEMES for h in h_max_grid}
    floors = {k: np.empty(n_paths, dtype=np.int64) for k in steps}
    retakes = {k: np.empty(n_paths, dtype=np.int64) for k in steps}

    def pass1(lo: int, hi: int):
        lattice = _lattice_block(seed, resolution_exp, horizon, lo, hi)
        timings = {}
        ref = _reference_terminal(model, lattice, tick)
        for h_max in h_max_grid:
            strat = strategy_template.instantiate(h_max)
            for scheme in ADAPTIVE_SCHEMES:
                t0 = time.perf_counter()
                y, n, fl, rt = simulate_terminal_batch(model, strat, lattice, tick, scheme)
                timings[(scheme, h_max)] = time.perf_counter() - t0
                x_term[(scheme, h_max)][lo:hi] = y * y
                steps[(scheme, h_max)][lo:hi] = n
                floors[(scheme, h_max)][lo:hi] = fl
                retakes[(scheme, h_max)][lo:hi] = rt
        x_ref[lo:hi] = ref
        return timings

    block_times = _map_blocks([lambda lo=lo, hi=hi: pass1(lo, hi) for lo, hi in blocks], threads)
    wall = {key: sum(bt[key] for bt in block_times) for key in block_times[0]}

    h_fixed_ticks = {}
    h_mean = {}
    for h_max in h_max_grid:
        for scheme in ADAPTIVE_SCHEMES:
            h_mean[(scheme, h_max)] = float(np.mean(horizon / steps[(scheme, h_max)]))
        # fixed-step schemes run at the explicit-adaptive mean step, ties rounded up
        h_fixed_ticks[h_max] = max(1, int(math.floor(h_mean[("EA", h_max)] / tick + 0.5)))

    x_fixed = {(s, h): np.empty(n_paths) for s in FIXED_SCHEMES for h in h_max_grid}

    def pass2(lo: int, hi: int):
        lattice = _lattice_block(seed, resolution_exp, horizon, lo, hi)
        timings = {}
        for h_max in h_max_grid:
            for scheme in FIXED_SCHEMES:
                t0 = time.perf_counter()
                xs = _fixed_terminal(model, scheme, lattice, tick, h_fixed_ticks[h_max])
                timings[(scheme, h_max)] = time.perf_counter() - t0
                x_fixed[(scheme, h_max)][lo:hi] = xs
        return timings

    block_times = _map_blocks([lambda lo=lo, hi=hi: pass2(lo, hi) for lo, hi in blocks], threads)
    for key, value in {
        key: sum(bt[key] for bt in block_times) for key in block_times[0]
    }.items():
        wall[key] = value

    rows: list[ConvergenceRow] = []
    for h_max in h_max_grid:
        for scheme in SCHEME_ORDER:
            if scheme in ADAPTIVE_SCHEMES:
                key = (scheme, h_max)
                n_total = int(np.sum(steps[key]))
                n_floor = int(np.sum(floors[key]))
                n_retake = int(np.sum(retakes[key]))
                rows.append(
                    ConvergenceRow(
                        scheme=scheme,
                        h_max=h_max,
                        h_mean=h_mean[key],
                        rmse=float(np.sqrt(np.mean((x_ref - x_term[key]) ** 2))),
                        wall_seconds=wall[key] if record_timing else 0.0,
                        pct_retake=100.0 * n_retake / n_total,
                        pct_floor=100.0 * n_floor / n_total,
                        n_paths=n_paths,
                        seed=seed,
                        resolution_exp=resolution_exp,
                        total_steps=n_total,
                        total_floor=n_floor,
                        total_retake=n_retake,
                    )
                )
            else:
                h_fixed = h_fixed_ticks[h_max] * tick
                n_steps_fixed = -(-total_ticks // h_fixed_ticks[h_max])
                rows.append(
                    ConvergenceRow(
                        scheme=scheme,
                        h_max=h_fixed,
                        h_mean=h_fixed,
                        rmse=float(np.sqrt(np.mean((x_ref - x_fixed[(scheme, h_max)]) ** 2))),
                        wall_seconds=wall[(scheme, h_max)] if record_timing else 0.0,
                        pct_retake=0.0,
                        pct_floor=0.0,
                        n_paths=n_paths,
                        seed=seed,
                        resolution_exp=resolution_exp,
                        total_steps=n_steps_fixed * n_paths,
                    )
                )
    return rows


def fit_order(rows: Sequence[ConvergenceRow]) -> float:
    """Least-squares slope of log RMSE against log mean step for one scheme's rows."""
    if len(rows) < 3:
        raise ValueError("order estimation needs at least 3 grid points")
    if any(r.rmse <= 0.0 for r in rows):
        raise ValueError("order estimation needs strictly positive RMSE values")
    h = np.log([r.h_mean for r in rows])
    e = np.log([r.rmse for r in rows])
    return float(np.polyfit(h, e, 1)[0])


def run_sweep(
    kappa: float,
    lam: float,
    x0: float,
    a_values: Sequence[float],
    n_paths: int,
    *,
    strategy_template: StrategyTemplate = StrategyTemplate(),
    h_max_grid: Sequence[float] = (2.0**-4, 2.0**-5, 2.0**-6, 2.0**-7, 2.0**-8, 2.0**-9),
    seed: int,
    resolution_exp: int = 18,
    horizon: float = 1.0,
    threads: int = 1,
    record_timing: bool = True,
) -> list[SweepRow]:
    """Order estimates and backstop usage across the volatility regimes a = sigma^2/(2*kappa*lam).

    kappa, lam and x0 stay fixed while sigma = sqrt(2*kappa*lam*a) varies over
    a_values; each point runs a full coupled convergence experiment.
    """
    out: list[SweepRow] = []
    for a in a_values:
        sigma = math.sqrt(2.0 * kappa * lam * a)
        model = make_model(kappa, lam, sigma, x0)
        rows = run_convergence(
            model,
            strategy_template,
            h_max_grid,
            n_paths,
            seed=seed,
            resolution_exp=resolution_exp,
            horizon=horizon,
            threads=threads,
            record_timing=record_timing,
        )
        for scheme in SCHEME_ORDER:
            scheme_rows = [r for r in rows if r.scheme == scheme]
            total = sum(r.total_steps for r in scheme_rows)
            out.append(
                SweepRow(
                    a=a,
                    sigma=sigma,
                    scheme=scheme,
                    order=fit_order(scheme_rows),
                    pct_retake=100.0 * sum(r.total_retake for r in scheme_rows) / total,
                    pct_floor=100.0 * sum(r.total_floor for r in scheme_rows) / total,
                    n_paths=n_paths,
                    seed=seed,
                    resolution_exp=resolution_exp,
                )
            )
    return out


def prob_surface_rows(
    model: CirModel,
    *,
    r: int = 1,
    rho: int = 64,
    h_max_values: Sequence[float] | None = None,
    n_y: int = 60,
) -> list[tuple[float, float, float]]:
    """(y, h_max, probability) grid for the one-step overshoot surface.

    For each h_max the y axis spans (h_min, 1.5]; points at or below that
    strategy's floor are omitted (the probability is not defined there).
    """
    from .positivity import one_step_neg_prob

    if h_max_values is None:
        h_max_values = np.linspace(0.01, 1.0, 50)
    rows = []
    for h_max in h_max_values:
        strategy = StepStrategy(StrategyKind.ONE_SIDED, r, float(h_max), rho)
        ys = np.linspace(strategy.h_min, 1.5, n_y + 1)[1:]
        for y in ys:
            rows.append((float(y), float(h_max), one_step_neg_prob(model, strategy, float(y))))
    return rows


# ---------------------------------------------------------------------------
# CSV artifacts


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip form, also for numpy scalars
    return str(value)


def _write_csv(path, header: str, columns: str, rows: Iterable[tuple]) -> None:
    lines = [header, columns]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def provenance_header(seed: int, resolution_exp: int) -> str:
    from . import __version__

    return f"# seed={seed} K={resolution_exp} version={__version__}"


def write_convergence_csv(rows: Sequence[ConvergenceRow], path, *, seed: int, resolution_exp: int):
    _write_csv(
        path,
        provenance_header(seed, resolution_exp),
        "scheme,h_max,h_mean,rmse,wall_seconds,pct_retake,pct_floor,M,seed,K",
        (
            (r.scheme, r.h_max, r.h_mean, r.rmse, r.wall_seconds, r.pct_retake, r.pct_floor,
             r.n_paths, r.seed, r.resolution_exp)
            for r in rows
        ),
    )


def write_sweep_csv(rows: Sequence[SweepRow], path, *, seed: int, resolution_exp: int):
    _write_csv(
        path,
        provenance_header(seed, resolution_exp),
        "a,sigma,scheme,order,pct_retake,pct_floor,M,seed,K",
        (
            (r.a, r.sigma, r.scheme, r.order, r.pct_retake, r.pct_floor,
             r.n_paths, r.seed, r.resolution_exp)
            for r in rows
        ),
    )


def write_positivity_csv(rows: Sequence[PositivityRow], path, *, seed: int, resolution_exp: int):
    _write_csv(
        path,
        provenance_header(seed, resolution_exp),
        "rho,Q,R,kappa,lambda,sigma,epsilon,h_bar",
        ((r.rho, r.Q, r.R, r.kappa, r.lam, r.sigma, r.epsilon, r.h_bar) for r in rows),
    )


def write_prob_surface_csv(rows, path, *, seed: int, resolution_exp: int):
    _write_csv(
        path,
        provenance_header(seed, resolution_exp),
        "y,h_max,prob",
        rows,
    )
