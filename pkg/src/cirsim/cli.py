"""Command-line entry point: experiment families in, provenance-stamped CSVs out.

Subcommands: convergence, sweep, positivity-bound, prob-surface, simulate.
All numeric inputs are validated before any computation starts; exit status is
0 on success, 2 for invalid inputs, 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

import numpy as np

from .adaptive import StepStrategy, StrategyKind, exact_ticks, simulate
from .driver import PathDriver
from .experiments import (
    PositivityRow,
    StrategyTemplate,
    prob_surface_rows,
    provenance_header,
    run_convergence,
    run_sweep,
    write_convergence_csv,
    write_positivity_csv,
    write_prob_surface_csv,
    write_sweep_csv,
)
from .model import ParameterError, make_model, read_param_file
from .positivity import GH_CONVENTIONS, PositivityQuery, hmax_bound

_MODEL_DEFAULTS = {"kappa": 2.0, "lambda": 0.05, "sigma": 0.2, "x0": 4e-4}
_PROVENANCE_NAMES = {0: "explicit", 1: "backstop_floor", 2: "backstop_retake"}


def _dyadic(text: str) -> float:
    """Accept '2^-7' or a plain float literal."""
    m = re.fullmatch(r"2\^(-?\d+)", text.strip())
    if m:
        return 2.0 ** int(m.group(1))
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a step like 2^-7 or a number, got {text!r}")


def _dyadic_grid(text: str) -> list[float]:
    """Accept '2^-4..2^-9' (dyadic range) or a comma-separated list of steps."""
    m = re.fullmatch(r"2\^-(\d+)\.\.2\^-(\d+)", text.strip())
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            lo, hi = hi, lo
        return [2.0**-i for i in range(lo, hi + 1)]
    return [_dyadic(part) for part in text.split(",") if part.strip()]


def _eps_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _add_model_flags(p: argparse.ArgumentParser, *, with_sigma: bool = True) -> None:
    p.add_argument("--kappa", type=float, default=None, help="mean-reversion rate")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="long-run mean")
    if with_sigma:
        p.add_argument("--sigma", type=float, default=None, help="volatility")
    p.add_argument("--x0", type=float, default=None, help="initial value")
    p.add_argument("--config", type=Path, default=None, help="key=value parameter file")


def _add_strategy_flags(p: argparse.ArgumentParser, *, default_kind: str = "one-sided") -> None:
    p.add_argument("--strategy", choices=["one-sided", "two-sided"], default=default_kind)
    p.add_argument("--r", type=int, default=1, help="step-rule exponent")
    p.add_argument("--rho", type=int, default=64, help="h_max / h_min ratio (power of two)")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--M", dest="n_paths", type=int, default=500, help="number of sample paths")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--resolution-exp", type=int, default=18, help="fine grid has 2^K ticks")
    p.add_argument("--T", dest="horizon", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--no-timing", action="store_true",
                   help="write wall_seconds as 0.0 for byte-reproducible output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cirsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convergence", help="coupled strong-convergence experiment")
    _add_model_flags(p)
    _add_strategy_flags(p)
    _add_run_flags(p)
    p.add_argument("--hmax-grid", type=_dyadic_grid,
                   default=[2.0**-i for i in range(4, 10)], help="e.g. 2^-4..2^-9")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("sweep", help="order estimates across the a = sigma^2/(2*kappa*lambda) range")
    _add_model_flags(p, with_sigma=False)
    _add_strategy_flags(p)
    _add_run_flags(p)
    p.add_argument("--hmax-grid", type=_dyadic_grid, default=[2.0**-i for i in range(4, 10)])
    p.add_argument("--a-min", type=float, default=0.04)
    p.add_argument("--a-max", type=float, default=1.6)
    p.add_argument("--a-points", type=int, default=40)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("positivity-bound", help="largest h_max keeping retakes below a tolerance")
    _add_model_flags(p)
    _add_strategy_flags(p, default_kind="two-sided")
    p.add_argument("--T", dest="horizon", type=float, default=1.0)
    p.add_argument("--eps", type=_eps_list, required=True, help="tolerance(s), comma separated")
    p.add_argument("--gh-convention", choices=list(GH_CONVENTIONS), default="as-printed")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--resolution-exp", type=int, default=18)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("prob-surface", help="one-step overshoot probability surface")
    _add_model_flags(p)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--rho", type=int, default=64)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--resolution-exp", type=int, default=18)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("simulate", help="run one adaptive trajectory and dump it")
    _add_model_flags(p)
    _add_strategy_flags(p)
    p.add_argument("--hmax", type=_dyadic, default=2.0**-7)
    p.add_argument("--scheme", choices=["EA", "SIA"], default="EA")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--path-index", type=int, default=0)
    p.add_argument("--resolution-exp", type=int, default=18)
    p.add_argument("--T", dest="horizon", type=float, default=1.0)
    p.add_argument("--dump-paths", type=Path, default=None, help="trajectory CSV output")

    return parser


def _build_model(args, *, sigma: float | None = None):
    values = dict(_MODEL_DEFAULTS)
    if args.config is not None:
        values.update(read_param_file(args.config))
    for key, attr in (("kappa", "kappa"), ("lambda", "lam"), ("sigma", "sigma"), ("x0", "x0")):
        flag = getattr(args, attr, None)
        if flag is not None:
            values[key] = flag
    if sigma is not None:
        values["sigma"] = sigma
    return make_model(values["kappa"], values["lambda"], values["sigma"], values["x0"])


def _validate_run(args) -> None:
    if args.n_paths < 1:
        raise ParameterError("--M must be >= 1")
    if args.threads < 1:
        raise ParameterError("--threads must be >= 1")
    if not 1 <= args.resolution_exp <= 26:
        raise ParameterError("--resolution-exp must lie in [1, 26]")
    if args.horizon <= 0:
        raise ParameterError("--T must be positive")


def _validate_grid(args) -> StrategyTemplate:
    template = StrategyTemplate(StrategyKind(args.strategy), args.r, args.rho)
    tick = args.horizon / (1 << args.resolution_exp)
    for h_max in args.hmax_grid:
        strat = template.instantiate(h_max)  # validates h_max itself
        if exact_ticks(strat.h_max, tick) % strat.rho:
            raise ParameterError(f"h_max {h_max!r} is not aligned to rho*delta for K={args.resolution_exp}")
    return template


def _cmd_convergence(args):
    model = _build_model(args)
    _validate_run(args)
    template = _validate_grid(args)

    def run():
        rows = run_convergence(
            model, template, args.hmax_grid, args.n_paths,
            seed=args.seed, resolution_exp=args.resolution_exp, horizon=args.horizon,
            threads=args.threads, record_timing=not args.no_timing,
        )
        write_convergence_csv(rows, args.out, seed=args.seed, resolution_exp=args.resolution_exp)

    return run


def _cmd_sweep(args):
    values = dict(_MODEL_DEFAULTS)
    if args.config is not None:
        values.update(read_param_file(args.config))
    kappa = args.kappa if args.kappa is not None else values["kappa"]
    lam = args.lam if args.lam is not None else values["lambda"]
    x0 = args.x0 if args.x0 is not None else values["x0"]
    make_model(kappa, lam, 1.0, x0)  # domain check for the fixed parameters
    _validate_run(args)
    template = _validate_grid(args)
    if args.a_points < 1 or args.a_min <= 0 or args.a_max < args.a_min:
        raise ParameterError("need 0 < --a-min <= --a-max and --a-points >= 1")
    a_values = [float(a) for a in np.linspace(args.a_min, args.a_max, args.a_points)]

    def run():
        rows = run_sweep(
            kappa, lam, x0, a_values, args.n_paths,
            strategy_template=template, h_max_grid=args.hmax_grid,
            seed=args.seed, resolution_exp=args.resolution_exp, horizon=args.horizon,
            threads=args.threads, record_timing=not args.no_timing,
        )
        write_sweep_csv(rows, args.out, seed=args.seed, resolution_exp=args.resolution_exp)

    return run


def _cmd_positivity(args):
    model = _build_model(args)
    queries = []
    for eps in args.eps:
        strategy = StepStrategy(StrategyKind(args.strategy), args.r, 1.0, args.rho)
        queries.append(PositivityQuery(model, strategy, eps, args.horizon, args.gh_convention))

    def run():
        rows = []
        for query in queries:
            bound = hmax_bound(query)
            rows.append(PositivityRow(
                rho=query.strategy.rho, Q=query.strategy.Q, R=query.strategy.R,
                kappa=model.kappa, lam=model.lam, sigma=model.sigma,
                epsilon=query.epsilon, h_bar=bound.value,
            ))
        write_positivity_csv(rows, args.out, seed=args.seed, resolution_exp=args.resolution_exp)

    return run


def _cmd_prob_surface(args):
    model = _build_model(args)
    if args.r < 1:
        raise ParameterError("--r must be >= 1")

    def run():
        rows = prob_surface_rows(model, r=args.r, rho=args.rho)
        write_prob_surface_csv(rows, args.out, seed=args.seed, resolution_exp=args.resolution_exp)

    return run


def _cmd_simulate(args):
    model = _build_model(args)
    if not 1 <= args.resolution_exp <= 26:
        raise ParameterError("--resolution-exp must lie in [1, 26]")
    strategy = StepStrategy(StrategyKind(args.strategy), args.r, args.hmax, args.rho)
    driver = PathDriver(args.seed, args.path_index, args.resolution_exp, args.horizon)
    exact_ticks(strategy.h_min, driver.tick)

    def run():
        traj = simulate(model, strategy, driver, args.scheme)
        if args.dump_paths is not None:
            lines = [provenance_header(args.seed, args.resolution_exp), "t,h,Y,X,provenance"]
            for i in range(traj.n_steps):
                t, h = float(traj.times[i + 1]), float(traj.steps[i])
                y = float(traj.states[i + 1])
                lines.append(
                    f"{t!r},{h!r},{y!r},{y * y!r},{_PROVENANCE_NAMES[int(traj.provenance[i])]}"
                )
            args.dump_paths.write_text("\n".join(lines) + "\n", newline="\n")
        else:
            print(
                f"scheme={args.scheme} steps={traj.n_steps} floor={traj.n_floor} "
                f"retake={traj.n_retake} X(T)={traj.states[-1] ** 2!r}"
            )

    return run


_COMMANDS = {
    "convergence": _cmd_convergence,
    "sweep": _cmd_sweep,
    "positivity-bound": _cmd_positivity,
    "prob-surface": _cmd_prob_surface,
    "simulate": _cmd_simulate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        run = _COMMANDS[args.command](args)
    except (ParameterError, ValueError, OSError) as exc:
        print(f"cirsim: invalid input: {exc}", file=sys.stderr)
        return 2
    try:
        run()
    except Exception as exc:  # computation failed after valid inputs
        print(f"cirsim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
