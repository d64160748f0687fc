"""Command-line front end: ``wpmec {eval,sweep,figure,optimize}``.

Exit status: 0 on success, 2 for an invalid scenario or precondition,
3 when a numerical routine fails to converge.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import ConvergenceError, ParameterError
from .figures import FIGURES, build_figure, write_figure
from .optimizer import optimize_avg_bits, optimize_success
from .report import METRICS, check, evaluate, sweep, write_csv
from .scenario import Scenario, load_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3
_PROBABILITY_METRICS = ("success", "success-lb")


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", type=Path, help="INI scenario file; defaults to the built-in fig-1 setup")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="override a scenario field, e.g. system.distance_m=15 (repeatable)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials (overrides [sim] trials)")
    p.add_argument("--seed", type=int, help="Monte Carlo seed (overrides [sim] seed)")
    p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo chunks")


def _scenario(args) -> Scenario:
    overrides = list(args.override)
    if args.trials is not None:
        overrides.append(f"sim.trials={args.trials}")
    if args.seed is not None:
        overrides.append(f"sim.seed={args.seed}")
    return load_scenario(args.scenario, overrides)


def _format(metric: str, value: float) -> str:
    return f"{value:.6f}" if metric in _PROBABILITY_METRICS else f"{value:.6g}"


def cmd_eval(args) -> int:
    scenario = _scenario(args)
    value = evaluate(scenario, args.metric)
    print(f"{args.metric}: {_format(args.metric, value)}")
    if args.check:
        result = check(scenario, args.metric, value, args.workers)
        if result.estimate is not None:
            print(f"monte-carlo: {_format(args.metric, result.estimate)} +/- {result.stderr:.3g} "
                  f"({scenario.trials} trials, seed {scenario.seed})")
        print(f"verdict: {'PASS' if result.agrees else 'FAIL'} ({result.detail})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _scenario(args)
    metrics = [m.strip() for m in args.metric.split(",") if m.strip()]
    rows = sweep(scenario, metrics, with_check=args.check, workers=args.workers)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_figure(args) -> int:
    overrides = list(args.override)
    if args.trials is not None:
        overrides.append(f"trials={args.trials}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    fig = build_figure(args.name, overrides)
    out = args.out or Path("figures") / args.name
    for path in write_figure(fig, out, plot=not args.no_plot):
        print(path)
    return EXIT_OK


def cmd_optimize(args) -> int:
    scenario = _scenario(args)
    if args.metric == "success":
        result = optimize_success(scenario.params, scenario.task_bits, partial_mu=args.partial)
        split_name = "mu"
    else:
        result = optimize_avg_bits(scenario.params, partial_tau=args.partial)
        split_name = "tau"
    print(f"best: {split_name}={result.split:.6g} t_e={result.t_e:.6g} "
          f"{args.metric}={_format(args.metric, result.best_value)}")
    for name, b in result.baselines.items():
        print(f"  {name}: {split_name}={b.split:.6g} t_e={b.t_e:.6g} {args.metric}={_format(args.metric, b.value)}")
    print(f"evaluations: {result.evaluations}, final grid step: {result.grid_resolution:.3g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpmec", description="Wireless-powered edge computing analytics.")
    parser.add_argument("--version", action="version", version=f"wpmec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one metric for a scenario")
    _add_scenario_args(p)
    p.add_argument("--metric", choices=METRICS, default="success")
    p.add_argument("--check", action="store_true", help="cross-check against Monte Carlo")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="sweep the scenario's [sweep] variable and emit CSV")
    _add_scenario_args(p)
    p.add_argument("--metric", default="success", help=f"comma-separated subset of {','.join(METRICS)}")
    p.add_argument("--check", action="store_true", help="add Monte Carlo columns")
    p.add_argument("--out", type=Path, help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="regenerate the curve data (and PNG) of a standard figure")
    p.add_argument("name", choices=FIGURES)
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="override a figure setting from data/figures.ini (repeatable)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, help="output directory (default: figures/<name>)")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG rendering")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("optimize", help="maximise success probability or expected bits")
    _add_scenario_args(p)
    p.add_argument("--metric", choices=("success", "avg-bits"), default="success")
    p.add_argument("--partial", type=float, default=0.5, help="split of the fixed partial baseline")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
