"""Metric evaluation, Monte Carlo cross-checks and sweep tables for scenarios."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, TextIO

from .analytics import (
    PROBABILITY_QUADRATURE,
    SuccessQuery,
    average_bits,
    r_max_deterministic,
    success_probability,
    success_probability_lower_bound,
)
from .errors import ParameterError
from .montecarlo import MCEstimate, simulate_avg_bits, simulate_deterministic_feasible, simulate_success
from .scenario import Scenario

METRICS = ("success", "success-lb", "avg-bits", "rmax")
CSV_HEADER = ("x", "metric", "analytic", "mc_estimate", "mc_stderr")
_MODE_FOR = {"success": "mu", "success-lb": "mu", "rmax": "mu", "avg-bits": "tau"}


@dataclass(frozen=True)
class SweepRow:
    x: float
    metric: str
    analytic: float
    mc_estimate: float | None = None
    mc_stderr: float | None = None


@dataclass(frozen=True)
class CheckResult:
    estimate: float | None
    stderr: float | None
    agrees: bool
    detail: str


def _require_mode(scenario: Scenario, metric: str) -> None:
    if metric not in METRICS:
        raise ParameterError(f"unknown metric {metric!r}; expected one of {METRICS}")
    mode = _MODE_FOR[metric]
    if scenario.mode != mode:
        raise ParameterError(f"metric {metric!r} needs [policy] mode = {mode}, got {scenario.mode}")


def evaluate(scenario: Scenario, metric: str) -> float:
    _require_mode(scenario, metric)
    policy = scenario.policy()
    params = scenario.params
    if metric == "avg-bits":
        return average_bits(params, policy.t_e, policy.split)
    if metric == "rmax":
        return r_max_deterministic(params, policy.t_e, policy.offload_bits, policy.local_bits).r_max_m
    query = SuccessQuery(params, policy)
    if metric == "success":
        return success_probability(query)
    return success_probability_lower_bound(query)


def check(scenario: Scenario, metric: str, value: float, workers: int = 1) -> CheckResult:
    """Monte Carlo (or, for rmax, unit-gain bracketing) verdict on an analytic value."""
    _require_mode(scenario, metric)
    policy = scenario.policy()
    params = scenario.params
    if metric == "rmax":
        inside = simulate_deterministic_feasible(
            params.replace(distance_m=0.99 * value), policy.t_e, policy.offload_bits, policy.local_bits
        )
        outside = simulate_deterministic_feasible(
            params.replace(distance_m=1.01 * value), policy.t_e, policy.offload_bits, policy.local_bits
        )
        ok = inside and not outside
        return CheckResult(None, None, ok, f"feasible at 0.99 r_max: {inside}; feasible at 1.01 r_max: {outside}")
    cfg = scenario.sim_config(workers)
    if metric == "avg-bits":
        est = simulate_avg_bits(params, policy.t_e, policy.split, cfg)
    else:
        est = simulate_success(params, policy, cfg)
    if metric == "success-lb":
        ok = value <= est.estimate + 3 * est.stderr + PROBABILITY_QUADRATURE.abs_tol
        return CheckResult(est.estimate, est.stderr, ok, "bound <= simulated probability" if ok else "bound exceeds simulation")
    slack = PROBABILITY_QUADRATURE.abs_tol if metric == "success" else 0.0
    ok = agrees(est, value, slack)
    return CheckResult(est.estimate, est.stderr, ok, "agree within 3 stderr" if ok else "DISAGREE beyond 3 stderr")


def agrees(est: MCEstimate, value: float, slack: float = 0.0) -> bool:
    return est.agrees_with(value, 3.0, slack)


def sweep(scenario: Scenario, metrics: Iterable[str], with_check: bool = False, workers: int = 1) -> list[SweepRow]:
    """One row per (sweep point, metric), ordered by swept value ascending.

    Every point is validated before anything is evaluated, so an infeasible
    point fails fast and names itself.
    """
    if scenario.sweep is None:
        raise ParameterError("scenario has no [sweep] section")
    metrics = list(metrics)
    for metric in metrics:
        _require_mode(scenario, metric)
    variable = scenario.sweep.variable
    points = []
    for i, x in enumerate(scenario.sweep.values()):
        try:
            point = scenario.with_value(variable, x)
            point.policy()
        except ParameterError as exc:
            raise type(exc)(f"sweep point {i + 1} ({variable}={x:g}): {exc}") from None
        points.append((float(x), point))
    rows = []
    for x, point in points:
        for metric in metrics:
            value = evaluate(point, metric)
            est = err = None
            if with_check and metric != "rmax":
                result = check(point, metric, value, workers)
                est, err = result.estimate, result.stderr
            rows.append(SweepRow(x, metric, value, est, err))
    return rows


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.12g}"


def write_csv(rows: Iterable[SweepRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(row.x), row.metric, _fmt(row.analytic), _fmt(row.mc_estimate), _fmt(row.mc_stderr)])


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(stream: TextIO) -> list[SweepRow]:
    reader = csv.reader(stream)
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ParameterError(f"unexpected CSV header {header}")
    out = []
    for x, metric, analytic, est, err in reader:
        out.append(SweepRow(float(x), metric, float(analytic), float(est) if est else None, float(err) if err else None))
    return out
