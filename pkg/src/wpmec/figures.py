"""Curve data for the three standard figures.

fig1/fig2: success probability vs distance for local computation, full
offloading, partial offloading and the jointly optimised policy, at two task
sizes, with unit-gain range markers (fig2 also carries lower-bound curves).
fig3: expected computed bits vs distance at two bandwidths.

Settings come from ``data/figures.ini``; see that file for which values are
fixed by the model setup and which are local choices.
"""

from __future__ import annotations

import configparser
import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytics import (
    average_bits_grid,
    r_max_deterministic,
    success_probability_grid,
    success_probability_lower_bound_grid,
)
from .errors import InfeasiblePolicyError, ParameterError
from .model import SystemParams, TaskPolicy, db_to_watts
from .montecarlo import SimConfig, simulate_avg_bits, simulate_success
from .optimizer import T_E_MAX_OFFLOAD, maximize_t_e, optimize_avg_bits, optimize_success
from .report import SweepRow, write_csv
from .scenario import ScenarioError

FIGURES = ("fig1", "fig2", "fig3")
MARKER_HEADER = ("curve", "r_max_m", "t_e", "value_at_r_max")


@dataclass
class Curve:
    key: str
    label: str
    metric: str
    group: str
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def x(self) -> np.ndarray:
        return np.array([r.x for r in self.rows])

    @property
    def y(self) -> np.ndarray:
        return np.array([r.analytic for r in self.rows])


@dataclass(frozen=True)
class Marker:
    curve: str
    r_max_m: float
    t_e: float
    value: float


@dataclass
class FigureData:
    name: str
    curves: list[Curve]
    markers: list[Marker] = field(default_factory=list)

    def curve(self, key: str) -> Curve:
        for c in self.curves:
            if c.key == key:
                return c
        raise KeyError(key)


def load_defaults(name: str, overrides: list[str] | None = None) -> dict[str, str]:
    """Merged [common] + [name] settings with ``key=value`` / ``name.key=value`` overrides."""
    if name not in FIGURES:
        raise ScenarioError(f"unknown figure {name!r}; expected one of {FIGURES}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string(importlib.resources.files("wpmec").joinpath("data/figures.ini").read_text())
    settings = dict(cp["common"])
    settings.update(cp[name])
    for item in overrides or []:
        if "=" not in item:
            raise ScenarioError(f"override {item!r} must look like key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if "." in key:
            target, key = key.split(".", 1)
            if target not in (name, "common"):
                continue
        if key not in settings:
            raise ScenarioError(f"{name} has no setting {key!r}; known: {sorted(settings)}")
        settings[key] = value
    return settings


def _floats(raw: str, key: str) -> list[float]:
    try:
        return [float(v) for v in raw.split(",")]
    except ValueError:
        raise ScenarioError(f"{key} must be a number or comma-separated numbers, got {raw!r}") from None


def _t_e_setting(raw: str, key: str) -> list[float | None]:
    out = []
    for part in raw.split(","):
        part = part.strip()
        out.append(None if part == "opt" else _floats(part, key)[0])
    return out


def _base_params(s: dict[str, str]) -> SystemParams:
    return SystemParams(
        tx_power_watts=db_to_watts(float(s["power_dbw"]), "dBW"),
        noise_watts=db_to_watts(float(s["noise_dbm"]), "dBm"),
        pathloss_exp=float(s["pathloss_exp"]),
        gamma2=float(s["gamma2"]),
        gamma4=float(s["gamma4"]),
        cpu_cap_coeff=float(s["xi"]),
        cycles_per_bit=float(s["psi"]),
    )


def _distances(s: dict[str, str]) -> np.ndarray:
    return np.linspace(float(s["r_from"]), float(s["r_to"]), int(float(s["points"])))


def crossings(x, a, b) -> list[float]:
    """x positions where curves ``a`` and ``b`` swap order (linear interpolation)."""
    x, diff = np.asarray(x, dtype=float), np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    out = []
    for i in range(len(x) - 1):
        d0, d1 = diff[i], diff[i + 1]
        if d0 == 0:
            out.append(float(x[i]))
        elif d0 * d1 < 0:
            out.append(float(x[i] + (x[i + 1] - x[i]) * d0 / (d0 - d1)))
    return out


def overtakes(x, a, b) -> list[float]:
    """Crossings where ``a`` goes from at-or-below ``b`` to above it (increasing x)."""
    x, diff = np.asarray(x, dtype=float), np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    out = []
    for i in range(len(x) - 1):
        d0, d1 = diff[i], diff[i + 1]
        if d0 <= 0 < d1:
            out.append(float(x[i] + (x[i + 1] - x[i]) * d0 / (d0 - d1)))
    return out


def _range_marker(p: SystemParams, key: str, task_bits: float, mu: float, t_e: float | None) -> Marker:
    l_o, l_c = mu * task_bits, (1 - mu) * task_bits
    if t_e is None:
        if mu == 0:
            t_e = 1.0
        else:
            def _reach(t: float) -> float:
                try:
                    return r_max_deterministic(p, t, l_o, l_c).r_max_m if t > 0 else 0.0
                except InfeasiblePolicyError:
                    return 0.0

            reach = np.vectorize(_reach)
            t_e, _ = maximize_t_e(reach, hi=T_E_MAX_OFFLOAD)
    r_max = r_max_deterministic(p, t_e, l_o, l_c).r_max_m
    value = float(success_probability_grid(p.replace(distance_m=r_max), task_bits, mu, t_e))
    return Marker(key, r_max, float(t_e), value)


def _success_figure(name: str, s: dict[str, str]) -> FigureData:
    base = _base_params(s).replace(bandwidth_hz=_floats(s["bandwidth_hz"], "bandwidth_hz")[0])
    distances = _distances(s)
    mu_p = float(s["partial_mu"])
    full_te = _t_e_setting(s["full_t_e"], "full_t_e")[0]
    partial_te = _t_e_setting(s["partial_t_e"], "partial_t_e")[0]
    with_lb = s.get("lower_bound", "no").strip().lower() in ("yes", "true", "1")
    every = max(1, int(float(s["mc_every"])))
    trials, seed = int(float(s["trials"])), int(float(s["seed"]))

    curves: list[Curve] = []
    markers: list[Marker] = []
    for task_bits in _floats(s["task_bits"], "task_bits"):
        group = f"l={task_bits:g}"
        tag = f"l{int(task_bits)}"
        policies = [("local", "local computation", 0.0, 1.0), ("full", "full offloading", 1.0, full_te),
                    ("partial", f"partial offloading (mu={mu_p:g})", mu_p, partial_te)]
        for pkey, label, mu, te_setting in policies:
            exact = Curve(f"{tag}_{pkey}", label, "success", group)
            bound = Curve(f"{tag}_{pkey}_lb", f"{label}, lower bound", "success-lb", group)
            for i, r in enumerate(distances):
                p = base.replace(distance_m=float(r))
                t_e = te_setting
                if t_e is None:
                    t_e, _ = maximize_t_e(lambda t: success_probability_grid(p, task_bits, mu, t))
                value = float(success_probability_grid(p, task_bits, mu, t_e))
                est = err = None
                if i % every == 0:
                    mc = simulate_success(p, TaskPolicy(task_bits, t_e, "mu", mu), SimConfig(trials, seed + i))
                    est, err = mc.estimate, mc.stderr
                exact.rows.append(SweepRow(float(r), "success", value, est, err))
                if with_lb:
                    lb = float(success_probability_lower_bound_grid(p, task_bits, mu, t_e))
                    bound.rows.append(SweepRow(float(r), "success-lb", lb))
            curves.append(exact)
            if with_lb:
                curves.append(bound)
            markers.append(_range_marker(base, exact.key, task_bits, mu, te_setting))
        best = Curve(f"{tag}_optimal", "optimal (mu*, t_e*)", "success", group)
        for i, r in enumerate(distances):
            p = base.replace(distance_m=float(r))
            opt = optimize_success(p, task_bits, mu_p)
            est = err = None
            if i % every == 0:
                policy = TaskPolicy(task_bits, opt.t_e, "mu", opt.split)
                mc = simulate_success(p, policy, SimConfig(trials, seed + i))
                est, err = mc.estimate, mc.stderr
            best.rows.append(SweepRow(float(r), "success", opt.best_value, est, err))
        curves.append(best)
    return FigureData(name, curves, markers)


def _bits_figure(name: str, s: dict[str, str]) -> FigureData:
    base = _base_params(s)
    distances = _distances(s)
    tau_p = float(s["partial_tau"])
    partial_te = _t_e_setting(s["partial_t_e"], "partial_t_e")[0]
    every = max(1, int(float(s["mc_every"])))
    trials, seed = int(float(s["trials"])), int(float(s["seed"]))
    curves: list[Curve] = []
    for bandwidth in _floats(s["bandwidth_hz"], "bandwidth_hz"):
        group = f"B={bandwidth:g} Hz"
        tag = f"B{int(bandwidth)}"
        policies = [(f"full_te{t:g}", f"full offloading (t_e={t:g})", 1.0, t)
                    for t in _t_e_setting(s["full_t_e"], "full_t_e")]
        te_label = "t_e*" if partial_te is None else f"t_e={partial_te:g}"
        policies.append(("partial", f"partial offloading (tau={tau_p:g}, {te_label})", tau_p, partial_te))
        policies.append(("local", "local computation", 0.0, 1.0))
        for pkey, label, tau, te_setting in policies:
            curve = Curve(f"{tag}_{pkey}", label, "avg-bits", group)
            for i, r in enumerate(distances):
                p = base.replace(distance_m=float(r), bandwidth_hz=bandwidth)
                t_e = te_setting
                if t_e is None:
                    t_e, _ = maximize_t_e(lambda t: average_bits_grid(p, t, np.full_like(t, tau)))
                value = float(average_bits_grid(p, t_e, tau))
                est = err = None
                if i % every == 0:
                    mc = simulate_avg_bits(p, t_e, tau, SimConfig(trials, seed + i))
                    est, err = mc.estimate, mc.stderr
                curve.rows.append(SweepRow(float(r), "avg-bits", value, est, err))
            curves.append(curve)
        best = Curve(f"{tag}_optimal", "optimal (tau*, t_e*)", "avg-bits", group)
        for i, r in enumerate(distances):
            p = base.replace(distance_m=float(r), bandwidth_hz=bandwidth)
            opt = optimize_avg_bits(p, tau_p)
            est = err = None
            if i % every == 0:
                mc = simulate_avg_bits(p, opt.t_e, opt.split, SimConfig(trials, seed + i))
                est, err = mc.estimate, mc.stderr
            best.rows.append(SweepRow(float(r), "avg-bits", opt.best_value, est, err))
        curves.append(best)
    return FigureData(name, curves)


def build_figure(name: str, overrides: list[str] | None = None) -> FigureData:
    settings = load_defaults(name, overrides)
    try:
        if name == "fig3":
            return _bits_figure(name, settings)
        return _success_figure(name, settings)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ScenarioError(f"bad {name} setting: {exc}") from None


def write_figure(fig: FigureData, out_dir: str | Path, plot: bool = True) -> list[Path]:
    """Write one CSV per curve, a marker table and (optionally) a PNG rendering."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for curve in fig.curves:
        path = out / f"{fig.name}_{curve.key}.csv"
        with path.open("w", newline="") as fh:
            write_csv(curve.rows, fh)
        written.append(path)
    if fig.markers:
        path = out / f"{fig.name}_markers.csv"
        with path.open("w", newline="") as fh:
            fh.write(",".join(MARKER_HEADER) + "\n")
            for m in fig.markers:
                fh.write(f"{m.curve},{m.r_max_m:.12g},{m.t_e:.12g},{m.value:.12g}\n")
        written.append(path)
    if plot:
        from .plotting import render_figure

        written.append(render_figure(fig, out / f"{fig.name}.png"))
    return written
