"""Scenario files: INI documents with [system], [policy], [sweep] and [sim] sections.

Missing keys fall back to the reference setup (P = 0 dBW,
sigma^2 = -50 dBm, alpha = 3, gamma2 = 0.0034, gamma4 = 0.3829, xi = 1e-28,
psi = 1e3, B = 1 MHz, r = 10 m).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .model import SystemParams, TaskPolicy, db_to_watts
from .montecarlo import SimConfig


class ScenarioError(ParameterError):
    """The scenario document is malformed or names an unknown field."""


SYSTEM_DEFAULTS = {
    "distance_m": 10.0,
    "pathloss_exp": 3.0,
    "bandwidth_hz": 1e6,
    "gamma2": 0.0034,
    "gamma4": 0.3829,
    "xi": 1e-28,
    "psi": 1e3,
}
POWER_KEYS = ("power_dbw", "power_watts")
NOISE_KEYS = ("noise_dbm", "noise_watts")
POLICY_KEYS = ("task_bits", "t_e", "mode", "split")
SWEEP_KEYS = ("variable", "from", "to", "points")
SIM_KEYS = ("trials", "seed")
SWEEP_VARIABLES = ("distance_m", "task_bits", "t_e", "split")

_ALLOWED = {
    "system": set(SYSTEM_DEFAULTS) | set(POWER_KEYS) | set(NOISE_KEYS),
    "policy": set(POLICY_KEYS),
    "sweep": set(SWEEP_KEYS),
    "sim": set(SIM_KEYS),
}


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    points: int

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ScenarioError(f"[sweep] variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if self.points < 1:
            raise ScenarioError(f"[sweep] points must be >= 1, got {self.points}")

    def values(self) -> np.ndarray:
        return np.sort(np.linspace(self.start, self.stop, self.points))


@dataclass
class Scenario:
    params: SystemParams = field(default_factory=SystemParams)
    task_bits: float = 1e4
    t_e: float = 1.0
    mode: str = "mu"
    split: float = 0.0
    sweep: Sweep | None = None
    trials: int = 100_000
    seed: int = 1

    def policy(self) -> TaskPolicy:
        return TaskPolicy(task_bits=self.task_bits, harvest_frac=self.t_e, mode=self.mode, split=self.split)

    def sim_config(self, workers: int = 1) -> SimConfig:
        return SimConfig(trials=self.trials, seed=self.seed, workers=workers)

    def with_value(self, variable: str, value: float) -> "Scenario":
        """Copy with one sweepable field replaced."""
        if variable == "distance_m":
            return _copy(self, params=self.params.replace(distance_m=float(value)))
        if variable in ("task_bits", "t_e", "split"):
            return _copy(self, **{variable: float(value)})
        raise ScenarioError(f"cannot sweep {variable!r}")


def _copy(s: Scenario, **changes) -> Scenario:
    data = dict(s.__dict__)
    data.update(changes)
    return Scenario(**data)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    return cp


def _float(cp, section: str, key: str) -> float:
    raw = cp.get(section, key)
    try:
        return float(raw)
    except ValueError:
        raise ScenarioError(f"[{section}] {key} must be a number, got {raw!r}") from None


def _int(cp, section: str, key: str) -> int:
    value = _float(cp, section, key)
    if value != int(value):
        raise ScenarioError(f"[{section}] {key} must be an integer, got {value}")
    return int(value)


def apply_overrides(cp: configparser.ConfigParser, overrides: list[str]) -> None:
    """Apply ``section.key=value`` (or bare ``key=value``) assignments in place."""
    for item in overrides:
        if "=" not in item:
            raise ScenarioError(f"override {item!r} must look like key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if "." in key:
            section, key = key.split(".", 1)
        else:
            owners = [s for s, keys in _ALLOWED.items() if key in keys]
            if not owners:
                raise ScenarioError(f"override names unknown field {key!r}")
            section = owners[0]
        if section not in _ALLOWED or key not in _ALLOWED[section]:
            raise ScenarioError(f"override names unknown field [{section}] {key}")
        if not cp.has_section(section):
            cp.add_section(section)
        if section == "system":
            # a new power/noise representation replaces the old one
            for group in (POWER_KEYS, NOISE_KEYS):
                if key in group:
                    for other in group:
                        cp.remove_option(section, other)
        cp.set(section, key, value)


def parse_scenario(text: str = "", overrides: list[str] | None = None) -> Scenario:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"cannot parse scenario: {exc}") from None
    for section in cp.sections():
        if section not in _ALLOWED:
            raise ScenarioError(f"unknown section [{section}]")
        for key in cp.options(section):
            if key not in _ALLOWED[section]:
                raise ScenarioError(f"unknown field [{section}] {key}")
    apply_overrides(cp, overrides or [])
    return _build(cp)


def load_scenario(path: str | Path | None, overrides: list[str] | None = None) -> Scenario:
    if path is None:
        return parse_scenario("", overrides)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    return parse_scenario(text, overrides)


def _build(cp: configparser.ConfigParser) -> Scenario:
    if not cp.has_section("system"):
        cp.add_section("system")
    sys_keys = set(cp.options("system"))
    for group, name in ((POWER_KEYS, "power"), (NOISE_KEYS, "noise")):
        present = [k for k in group if k in sys_keys]
        if len(present) > 1:
            raise ScenarioError(f"[system] give exactly one {name} field, got {present}")
    if "power_watts" in sys_keys:
        power = _float(cp, "system", "power_watts")
    else:
        power = db_to_watts(_float(cp, "system", "power_dbw") if "power_dbw" in sys_keys else 0.0, "dBW")
    if "noise_watts" in sys_keys:
        noise = _float(cp, "system", "noise_watts")
    else:
        noise = db_to_watts(_float(cp, "system", "noise_dbm") if "noise_dbm" in sys_keys else -50.0, "dBm")
    values = {k: (_float(cp, "system", k) if k in sys_keys else v) for k, v in SYSTEM_DEFAULTS.items()}
    params = SystemParams(
        tx_power_watts=power,
        distance_m=values["distance_m"],
        pathloss_exp=values["pathloss_exp"],
        noise_watts=noise,
        bandwidth_hz=values["bandwidth_hz"],
        gamma2=values["gamma2"],
        gamma4=values["gamma4"],
        cpu_cap_coeff=values["xi"],
        cycles_per_bit=values["psi"],
    )
    scenario = Scenario(params=params)
    if cp.has_section("policy"):
        for key in ("task_bits", "t_e", "split"):
            if cp.has_option("policy", key):
                setattr(scenario, key, _float(cp, "policy", key))
        if cp.has_option("policy", "mode"):
            mode = cp.get("policy", "mode").strip().strip('"')
            if mode not in ("mu", "tau"):
                raise ScenarioError(f"[policy] mode must be 'mu' or 'tau', got {mode!r}")
            scenario.mode = mode
    if cp.has_section("sweep"):
        missing = [k for k in SWEEP_KEYS if not cp.has_option("sweep", k)]
        if missing:
            raise ScenarioError(f"[sweep] missing fields {missing}")
        scenario.sweep = Sweep(
            cp.get("sweep", "variable").strip(),
            _float(cp, "sweep", "from"),
            _float(cp, "sweep", "to"),
            _int(cp, "sweep", "points"),
        )
    if cp.has_section("sim"):
        if cp.has_option("sim", "trials"):
            scenario.trials = _int(cp, "sim", "trials")
        if cp.has_option("sim", "seed"):
            scenario.seed = _int(cp, "sim", "seed")
    return scenario
