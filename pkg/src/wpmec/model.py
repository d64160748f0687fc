"""Deterministic link and energy arithmetic for a wireless-powered edge device.

A slot lasts one second: the device harvests for ``t_e`` seconds, then spends
the energy offloading during ``t_d = 1 - t_e`` and/or computing locally.
Energies are in joules, powers in watts, bits are real-valued.

All functions accept numpy arrays as well as floats.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InfeasiblePolicyError, ParameterError

LN2 = float(np.log(2.0))


def db_to_watts(value_db: float, reference: Literal["dBW", "dBm"] = "dBW") -> float:
    """Convert a power level in dBW or dBm to watts."""
    if not np.isfinite(value_db):
        raise ParameterError(f"power level must be finite, got {value_db}")
    if reference == "dBW":
        return float(10.0 ** (value_db / 10.0))
    if reference == "dBm":
        return float(10.0 ** (value_db / 10.0) * 1e-3)
    raise ParameterError(f"unknown power reference {reference!r}; expected 'dBW' or 'dBm'")


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of one AP/device link.

    ``gamma2``/``gamma4`` are the fitted second- and fourth-order rectifier
    constants; ``cpu_cap_coeff`` and ``cycles_per_bit`` set the local CPU cost.
    ``tx_power_watts = 0`` is allowed and means nothing is ever harvested.
    """

    tx_power_watts: float = 1.0
    distance_m: float = 10.0
    pathloss_exp: float = 3.0
    noise_watts: float = 1e-8
    bandwidth_hz: float = 1e6
    gamma2: float = 0.0034
    gamma4: float = 0.3829
    cpu_cap_coeff: float = 1e-28
    cycles_per_bit: float = 1e3

    def __post_init__(self) -> None:
        checks = [
            ("tx_power_watts", self.tx_power_watts >= 0, ">= 0"),
            ("distance_m", self.distance_m > 0, "> 0"),
            ("pathloss_exp", self.pathloss_exp > 2, "> 2"),
            ("noise_watts", self.noise_watts > 0, "> 0"),
            ("bandwidth_hz", self.bandwidth_hz > 0, "> 0"),
            ("gamma2", self.gamma2 >= 0, ">= 0"),
            ("gamma4", self.gamma4 >= 0, ">= 0"),
            ("cpu_cap_coeff", self.cpu_cap_coeff > 0, "> 0"),
            ("cycles_per_bit", self.cycles_per_bit >= 1, ">= 1"),
        ]
        for name, ok, rule in checks:
            value = getattr(self, name)
            if not np.isfinite(value) or not ok:
                raise ParameterError(f"{name} must be finite and {rule}, got {value}")
        if self.gamma2 == 0 and self.gamma4 == 0:
            raise ParameterError("gamma2 and gamma4 cannot both be zero")

    @classmethod
    def from_db(cls, power_dbw: float = 0.0, noise_dbm: float = -50.0, **kwargs) -> "SystemParams":
        return cls(
            tx_power_watts=db_to_watts(power_dbw, "dBW"),
            noise_watts=db_to_watts(noise_dbm, "dBm"),
            **kwargs,
        )

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    @property
    def pathloss(self) -> float:
        """r^alpha, the inverse of the large-scale power gain."""
        return float(self.distance_m**self.pathloss_exp)

    @property
    def cpu_energy_per_bit3(self) -> float:
        """xi * psi^3: joules per cubed bit of local computation."""
        return float(self.cpu_cap_coeff * self.cycles_per_bit**3)


SplitMode = Literal["mu", "tau"]


@dataclass(frozen=True)
class TaskPolicy:
    """How a task of ``task_bits`` is handled within one slot.

    ``mode='mu'`` splits the *task*: ``split * task_bits`` bits are offloaded,
    the rest computed locally. ``mode='tau'`` splits the *harvested energy*:
    a fraction ``split`` powers the uplink, the rest the CPU.
    """

    task_bits: float = 0.0
    harvest_frac: float = 0.5
    mode: SplitMode = "mu"
    split: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in ("mu", "tau"):
            raise ParameterError(f"mode must be 'mu' or 'tau', got {self.mode!r}")
        if not np.isfinite(self.task_bits) or self.task_bits < 0:
            raise ParameterError(f"task_bits must be >= 0, got {self.task_bits}")
        if not 0 <= self.harvest_frac <= 1:
            raise ParameterError(f"t_e must lie in [0, 1], got {self.harvest_frac}")
        if not 0 <= self.split <= 1:
            raise ParameterError(f"split must lie in [0, 1], got {self.split}")
        if self.split > 0 and self.harvest_frac >= 1:
            if self.mode == "mu" and self.task_bits > 0:
                raise InfeasiblePolicyError(
                    f"offloading (mu={self.split}) needs uplink time, but t_e=1 leaves t_d=0"
                )
            if self.mode == "tau":
                raise InfeasiblePolicyError(
                    f"offload energy share tau={self.split} needs uplink time, but t_e=1 leaves t_d=0"
                )

    @property
    def t_e(self) -> float:
        return self.harvest_frac

    @property
    def t_d(self) -> float:
        return 1.0 - self.harvest_frac

    @property
    def offload_bits(self) -> float:
        if self.mode != "mu":
            raise ParameterError("offloaded bit count is only fixed in task-split ('mu') mode")
        return self.split * self.task_bits

    @property
    def local_bits(self) -> float:
        if self.mode != "mu":
            raise ParameterError("local bit count is only fixed in task-split ('mu') mode")
        return (1.0 - self.split) * self.task_bits


@dataclass(frozen=True)
class ChannelDraw:
    """Small-scale power gains |h|^2 (downlink) and |g|^2 (uplink)."""

    h_gain: float = 1.0
    g_gain: float = 1.0

    def __post_init__(self) -> None:
        if self.h_gain < 0 or self.g_gain < 0:
            raise ParameterError(f"channel gains must be >= 0, got {self.h_gain}, {self.g_gain}")


@dataclass(frozen=True)
class EnergyBudget:
    harvested_j: float
    offload_j: float
    local_j: float

    @property
    def feasible(self) -> bool:
        return self.harvested_j >= self.offload_j + self.local_j


def _check_fraction(name: str, value) -> None:
    if np.any(np.asarray(value) < 0) or np.any(np.asarray(value) > 1):
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")


def _check_nonneg(name: str, value) -> None:
    if np.any(np.asarray(value) < 0):
        raise ParameterError(f"{name} must be >= 0, got {value}")


def harvested_energy(p: SystemParams, t_e, h_gain):
    """Energy collected during ``t_e`` with downlink gain ``h_gain``.

    Second- plus fourth-order rectifier response:
    t_e * (gamma2 P r^-a |h|^2 + 1.5 gamma4 P^2 r^-2a |h|^4).
    """
    _check_fraction("t_e", t_e)
    _check_nonneg("h_gain", h_gain)
    rx = p.tx_power_watts / p.pathloss
    return t_e * (p.gamma2 * rx * h_gain + 1.5 * p.gamma4 * rx**2 * h_gain**2)


def offload_bits(p: SystemParams, t_d, e_o, g_gain):
    """Bits pushed uplink in ``t_d`` seconds using energy ``e_o`` (zero when t_d or e_o is zero)."""
    _check_fraction("t_d", t_d)
    _check_nonneg("e_o", e_o)
    _check_nonneg("g_gain", g_gain)
    t_d = np.asarray(t_d, dtype=float)
    e_o = np.asarray(e_o, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = (e_o / t_d) * g_gain / (p.pathloss * p.noise_watts)
        bits = t_d * p.bandwidth_hz * np.log1p(snr) / LN2
    bits = np.where((t_d == 0) | (e_o == 0), 0.0, bits)
    return bits[()] if bits.ndim == 0 else bits


def offload_energy(p: SystemParams, t_d, l_o, g_gain):
    """Energy needed to push ``l_o`` bits uplink in ``t_d`` seconds over gain ``g_gain``.

    Raises InfeasiblePolicyError when bits must move but t_d or g_gain is zero.
    """
    _check_fraction("t_d", t_d)
    _check_nonneg("l_o", l_o)
    _check_nonneg("g_gain", g_gain)
    t_d = np.asarray(t_d, dtype=float)
    l_o = np.asarray(l_o, dtype=float)
    g_gain = np.asarray(g_gain, dtype=float)
    if np.any((l_o > 0) & ((t_d == 0) | (g_gain == 0))):
        raise InfeasiblePolicyError("offloading bits requires t_d > 0 and g_gain > 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        energy = t_d * np.expm1(LN2 * l_o / (t_d * p.bandwidth_hz)) * p.noise_watts * p.pathloss / g_gain
    energy = np.where(l_o == 0, 0.0, energy)
    return energy[()] if energy.ndim == 0 else energy


def local_energy(p: SystemParams, l_c):
    """CPU energy for ``l_c`` bits: xi psi^3 l_c^3."""
    _check_nonneg("l_c", l_c)
    return p.cpu_energy_per_bit3 * np.asarray(l_c, dtype=float) ** 3


def local_bits(p: SystemParams, e_c):
    """Bits computable on the CPU with energy ``e_c``."""
    _check_nonneg("e_c", e_c)
    return np.cbrt(np.asarray(e_c, dtype=float) / p.cpu_energy_per_bit3)


def energy_budget(p: SystemParams, policy: TaskPolicy, channel: ChannelDraw) -> EnergyBudget:
    """Harvested energy and the energy each branch of a task-split policy needs."""
    harvested = float(harvested_energy(p, policy.t_e, channel.h_gain))
    if policy.mode == "mu":
        e_o = float(offload_energy(p, policy.t_d, policy.offload_bits, channel.g_gain))
        e_c = float(local_energy(p, policy.local_bits))
    else:
        e_o = policy.split * harvested
        e_c = (1.0 - policy.split) * harvested
    return EnergyBudget(harvested, e_o, e_c)
