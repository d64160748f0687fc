"""Closed-form performance of harvest-then-offload/compute under Rayleigh fading.

Success means the harvested energy covers the offload energy plus the CPU
energy of a task split. With phi_o = (2^(l_o/(t_d B)) - 1) t_d sigma^2 r^a and
phi_c = xi psi^3 l_c^3 the requirement is

    t_e H > phi_o / |g|^2 + phi_c,    H = gamma2 P r^-a |h|^2 + 1.5 gamma4 P^2 r^-2a |h|^4

so the success probability is E_g[P(H > (phi_o/g + phi_c)/t_e)], a single
exp-weighted integral over the uplink gain g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import HarvestDistribution
from .errors import InfeasiblePolicyError, ParameterError
from .model import LN2, SystemParams, TaskPolicy
from .numerics import (
    QuadratureSpec,
    bessel_k1_scaled,
    cubic_residual,
    exp_e1_scaled,
    integrate_expweighted,
    solve_depressed_cubic_real,
)

PROBABILITY_QUADRATURE = QuadratureSpec(node_count=16, abs_tol=1e-10, max_refinements=3)
BITS_QUADRATURE = QuadratureSpec(node_count=16, abs_tol=1e-300, max_refinements=3, rel_tol=1e-9)


@dataclass(frozen=True)
class SuccessQuery:
    """A task-split policy evaluated against one link."""

    params: SystemParams
    policy: TaskPolicy

    def __post_init__(self) -> None:
        if self.policy.mode != "mu":
            raise ParameterError("success probability needs a task-split ('mu') policy")

    @classmethod
    def build(cls, params: SystemParams, task_bits: float, mu: float, t_e: float) -> "SuccessQuery":
        return cls(params, TaskPolicy(task_bits=task_bits, harvest_frac=t_e, mode="mu", split=mu))

    @property
    def phi_o(self) -> float:
        return float(offload_energy_scale(self.params, self.policy.offload_bits, self.policy.t_d))

    @property
    def phi_c(self) -> float:
        return float(self.params.cpu_energy_per_bit3 * self.policy.local_bits**3)


@dataclass(frozen=True)
class RangeResult:
    r_max_m: float
    root_alpha: float
    residual: float


def offload_energy_scale(p: SystemParams, l_o, t_d):
    """phi_o: offload energy at unit uplink gain, (2^(l_o/(t_d B)) - 1) t_d sigma^2 r^a."""
    l_o = np.asarray(l_o, dtype=float)
    t_d = np.asarray(t_d, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        phi = np.expm1(LN2 * l_o / (t_d * p.bandwidth_hz)) * t_d * p.noise_watts * p.pathloss
    return np.where(l_o == 0, 0.0, phi)


def _split_energies(p: SystemParams, task_bits, mu, t_e):
    task_bits, mu, t_e = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (task_bits, mu, t_e)))
    if np.any((task_bits * mu > 0) & (t_e >= 1)):
        raise InfeasiblePolicyError("offloading (mu > 0) requires t_e < 1 so that t_d > 0")
    if np.any((mu < 0) | (mu > 1) | (t_e < 0) | (t_e > 1) | (task_bits < 0)):
        raise ParameterError("need task_bits >= 0 and mu, t_e in [0, 1]")
    phi_o = offload_energy_scale(p, task_bits * mu, 1.0 - t_e)
    phi_c = p.cpu_energy_per_bit3 * ((1.0 - mu) * task_bits) ** 3
    return phi_o, phi_c, t_e


def success_probability_grid(p: SystemParams, task_bits, mu, t_e, spec: QuadratureSpec = PROBABILITY_QUADRATURE):
    """Vectorised success probability over broadcastable (task_bits, mu, t_e) arrays."""
    phi_o, phi_c, t_e = _split_energies(p, task_bits, mu, t_e)
    shape = phi_o.shape
    phi_o, phi_c, t_e = phi_o.ravel(), phi_c.ravel(), t_e.ravel()
    out = np.zeros(phi_o.shape)
    need = (phi_o + phi_c) > 0
    out[~need] = 1.0
    if p.tx_power_watts == 0:
        return out.reshape(shape)[()]
    dist = HarvestDistribution.from_params(p)
    live = need & (t_e > 0)
    local_only = live & (phi_o == 0)
    with np.errstate(divide="ignore"):
        out[local_only] = dist.sf(phi_c[local_only] / t_e[local_only])
    mixed = np.flatnonzero(live & (phi_o > 0))
    if mixed.size:
        po = phi_o[mixed, None]
        pc = phi_c[mixed, None]
        te = t_e[mixed, None]

        def integrand(g):
            with np.errstate(over="ignore"):
                return dist.sf((po / g + pc) / te)

        out[mixed] = integrate_expweighted(integrand, spec)
    return np.clip(out, 0.0, 1.0).reshape(shape)[()]


def success_probability(q: SuccessQuery, spec: QuadratureSpec = PROBABILITY_QUADRATURE) -> float:
    """Probability that one slot's harvest covers offloading mu*l bits and computing (1-mu)*l locally."""
    pol = q.policy
    return float(success_probability_grid(q.params, pol.task_bits, pol.split, pol.t_e, spec))


def local_success_closed_form(p: SystemParams, local_bits: float) -> float:
    """Full local computation with t_e = 1, written directly in terms of gamma2 and gamma4.

    exp(r^a gamma2 / (3 gamma4 P) * (1 - sqrt(1 + 6 gamma4 xi psi^3 l^3 / gamma2^2))).
    Requires gamma2 > 0 and gamma4 > 0.
    """
    if p.gamma2 <= 0 or p.gamma4 <= 0 or p.tx_power_watts <= 0:
        raise ParameterError("closed form needs gamma2 > 0, gamma4 > 0 and P > 0")
    phi_c = p.cpu_energy_per_bit3 * local_bits**3
    scale = p.pathloss * p.gamma2 / (3 * p.gamma4 * p.tx_power_watts)
    return float(np.exp(scale * (1 - np.sqrt(1 + 6 * p.gamma4 * phi_c / p.gamma2**2))))


def success_probability_lower_bound_grid(p: SystemParams, task_bits, mu, t_e):
    """Linearised-root bound; does not depend on gamma4.

    2 exp(-phi_c r^a/(t_e gamma2 P)) sqrt(z) K1(2 sqrt(z)),  z = phi_o r^a / (t_e gamma2 P).
    """
    phi_o, phi_c, t_e = _split_energies(p, task_bits, mu, t_e)
    need = (phi_o + phi_c) > 0
    denom = t_e * p.gamma2 * p.tx_power_watts
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        zo = np.where(need, phi_o * p.pathloss / denom, 0.0)
        zc = np.where(need, phi_c * p.pathloss / denom, 0.0)
        root = 2.0 * np.sqrt(zo)
        safe = np.where(root > 0, root, 1.0)
        k_term = np.where(root > 0, root * bessel_k1_scaled(safe) * np.exp(-np.where(root > 0, root, 0.0)), 1.0)
        bound = np.exp(-zc) * k_term
    bound = np.where(need & (denom == 0), 0.0, bound)
    bound = np.where(np.isnan(bound), 0.0, bound)
    return np.clip(bound, 0.0, 1.0)[()]


def success_probability_lower_bound(q: SuccessQuery) -> float:
    pol = q.policy
    return float(success_probability_lower_bound_grid(q.params, pol.task_bits, pol.split, pol.t_e))


def _average_bits_terms(p: SystemParams, t_e, tau, spec: QuadratureSpec):
    t_e, tau = np.broadcast_arrays(np.asarray(t_e, dtype=float), np.asarray(tau, dtype=float))
    if np.any((t_e < 0) | (t_e > 1) | (tau < 0) | (tau > 1)):
        raise ParameterError("need t_e and tau in [0, 1]")
    if np.any((tau > 0) & (t_e >= 1)):
        raise InfeasiblePolicyError("an offload energy share tau > 0 requires t_e < 1")
    shape = t_e.shape
    t_e, tau = t_e.ravel(), tau.ravel()
    offload = np.zeros(t_e.shape)
    local = np.zeros(t_e.shape)
    if p.tx_power_watts == 0:
        return offload.reshape(shape), local.reshape(shape)
    dist = HarvestDistribution.from_params(p)

    live = np.flatnonzero((tau > 0) & (t_e > 0))
    if live.size:
        t_d = 1.0 - t_e[live, None]
        scale = t_d * p.pathloss * p.noise_watts / (tau[live, None] * t_e[live, None])

        def integrand(u):
            with np.errstate(divide="ignore"):
                return exp_e1_scaled(scale / dist.transform(u))

        expected = integrate_expweighted(integrand, spec)
        offload[live] = (t_d[:, 0] * p.bandwidth_hz / LN2) * expected

    cpu = (tau < 1) & (t_e > 0)
    if np.any(cpu):
        cube_root_mean = integrate_expweighted(lambda u: np.cbrt(dist.transform(u)), spec)
        local[cpu] = np.cbrt((1.0 - tau[cpu]) * t_e[cpu] / p.cpu_energy_per_bit3) * cube_root_mean
    return offload.reshape(shape), local.reshape(shape)


def average_bits_grid(p: SystemParams, t_e, tau, spec: QuadratureSpec = BITS_QUADRATURE):
    offload, local = _average_bits_terms(p, t_e, tau, spec)
    return (offload + local)[()]


def average_bits(params: SystemParams, t_e: float, tau: float, spec: QuadratureSpec = BITS_QUADRATURE) -> float:
    """Expected offloaded plus locally computed bits when a fraction ``tau`` of the harvest powers the uplink.

    Not capped at any task size: this is the expected achievable throughput per slot.
    """
    return float(average_bits_grid(params, t_e, tau, spec))


def average_bits_split(params: SystemParams, t_e: float, tau: float, spec: QuadratureSpec = BITS_QUADRATURE):
    """(expected offloaded bits, expected locally computed bits)."""
    offload, local = _average_bits_terms(params, t_e, tau, spec)
    return float(offload), float(local)


def range_cubic(params: SystemParams, t_e: float, l_o: float, l_c: float) -> tuple[float, float, float, float]:
    """Coefficients (a, b, c, d) of the unit-gain feasibility cubic in y = r^alpha."""
    t_d = 1.0 - t_e
    a = float(offload_energy_scale(params.replace(distance_m=1.0), l_o, t_d)) if l_o > 0 else 0.0
    b = params.cpu_energy_per_bit3 * l_c**3
    c = -t_e * params.gamma2 * params.tx_power_watts
    d = -1.5 * t_e * params.gamma4 * params.tx_power_watts**2
    return a, b, c, d


def r_max_deterministic(params: SystemParams, t_e: float, l_o: float, l_c: float) -> RangeResult:
    """Largest distance at which the task is feasible with |h| = |g| = 1."""
    if l_o < 0 or l_c < 0 or l_o + l_c <= 0:
        raise ParameterError("need l_o, l_c >= 0 with l_o + l_c > 0")
    if not 0 < t_e <= 1:
        raise ParameterError(f"t_e must lie in (0, 1], got {t_e}")
    if l_o > 0 and t_e >= 1:
        raise InfeasiblePolicyError("offloading requires t_e < 1")
    if params.tx_power_watts == 0:
        raise ParameterError("no range exists with zero transmit power")
    coeffs = range_cubic(params, t_e, l_o, l_c)
    if not np.isfinite(coeffs[0]):
        raise InfeasiblePolicyError(f"offloading {l_o} bits in {1 - t_e:.3g} s overflows the energy model")
    if coeffs[3] == 0:
        # gamma4 = 0: factor out y and keep the quadratic a y^2 + b y + c
        coeffs_q = (0.0, coeffs[0], coeffs[1], coeffs[2])
        y = solve_depressed_cubic_real(coeffs_q)
        residual = cubic_residual(coeffs_q, y)
    else:
        y = solve_depressed_cubic_real(coeffs)
        residual = cubic_residual(coeffs, y)
    return RangeResult(float(y ** (1.0 / params.pathloss_exp)), float(y), float(residual))


def local_range_closed_form(params: SystemParams, l_c: float) -> float:
    """r_max^alpha for pure local computation with t_e = 1 (positive root of the quadratic)."""
    b = params.cpu_energy_per_bit3 * l_c**3
    return params.tx_power_watts / (2 * b) * (params.gamma2 + np.sqrt(params.gamma2**2 + 6 * params.gamma4 * b))


def local_range_at_confidence(params: SystemParams, l_c: float, delta: float) -> float:
    """Distance at which full local computation (t_e = 1) succeeds with probability ``delta``.

    Inverts the local-only success probability. The result is linear in
    -ln(delta) and equals the unit-gain range exactly at delta = 1/e.
    """
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    if l_c <= 0:
        raise ParameterError("l_c must be > 0")
    if params.tx_power_watts == 0:
        raise ParameterError("no range exists with zero transmit power")
    b = params.cpu_energy_per_bit3 * l_c**3
    p = params.tx_power_watts
    y = -np.log(delta) * p * (params.gamma2 + np.sqrt(params.gamma2**2 + 6 * params.gamma4 * b)) / (2 * b)
    return float(y ** (1.0 / params.pathloss_exp))


def local_range_at_confidence_closed_form(params: SystemParams, l_c: float, delta: float) -> float:
    """Same inversion written as 3 gamma4 P ln(delta)/gamma2 * (1 - sqrt(1 + 6 gamma4 b/gamma2^2))^-1."""
    b = params.cpu_energy_per_bit3 * l_c**3
    g2, g4, p = params.gamma2, params.gamma4, params.tx_power_watts
    y = 3 * g4 * p * np.log(delta) / g2 / (1 - np.sqrt(1 + 6 * g4 * b / g2**2))
    return float(y ** (1.0 / params.pathloss_exp))


FADING_BENEFIT_THRESHOLD = float(np.exp(-1.0))


def fading_extends_range(params: SystemParams, l_c: float, delta: float) -> bool:
    """True when fading lets local computation succeed with probability ``delta`` beyond the unit-gain range.

    Holds exactly for delta < 1/e.
    """
    beyond = local_range_at_confidence(params, l_c, delta)
    return beyond > r_max_deterministic(params, 1.0, 0.0, l_c).r_max_m
