"""Brute-force simulator used as an independent check on the closed forms.

Each trial draws one downlink gain |h|^2 and one uplink gain |g|^2 (block
fading, independent links) and applies the harvest-then-use protocol
literally through the functions in :mod:`wpmec.model`.

Trials are cut into fixed-size chunks; chunk ``k`` always uses stream
``(seed, k)``. Chunk statistics are merged in chunk order, so results are
bit-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .distributions import RngStream, sample_h_gain
from .errors import InfeasiblePolicyError, ParameterError
from .model import (
    SystemParams,
    TaskPolicy,
    harvested_energy,
    local_bits,
    local_energy,
    offload_bits,
    offload_energy,
)


@dataclass(frozen=True)
class SimConfig:
    trials: int = 1_000_000
    seed: int = 0
    chunk_size: int = 1 << 16
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if self.chunk_size < 1 or self.workers < 1:
            raise ParameterError("chunk_size and workers must be >= 1")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")

    def chunks(self) -> list[tuple[int, int]]:
        """(stream_id, size) for every chunk."""
        full, rest = divmod(self.trials, self.chunk_size)
        sizes = [self.chunk_size] * full + ([rest] if rest else [])
        return list(enumerate(sizes))


class MCEstimate(NamedTuple):
    estimate: float
    stderr: float
    trials: int

    def agrees_with(self, value: float, n_sigma: float = 3.0, slack: float = 0.0) -> bool:
        """|estimate - value| within ``n_sigma`` standard errors (plus an absolute ``slack``)."""
        return abs(self.estimate - value) <= n_sigma * self.stderr + slack


class _Moments(NamedTuple):
    count: int
    mean: float
    m2: float


def _merge(a: _Moments, b: _Moments) -> _Moments:
    # Chan et al. pairwise update of count/mean/sum of squared deviations
    if a.count == 0:
        return b
    n = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * b.count / n
    m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / n
    return _Moments(n, mean, m2)


def _chunk_moments(values: np.ndarray) -> _Moments:
    mean = float(np.mean(values))
    return _Moments(values.size, mean, float(np.sum((values - mean) ** 2)))


def _run(cfg: SimConfig, per_chunk: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> _Moments:
    def work(chunk: tuple[int, int]) -> _Moments:
        stream_id, size = chunk
        rng = RngStream(cfg.seed, stream_id)
        h = sample_h_gain(rng, size)
        g = sample_h_gain(rng, size)
        return _chunk_moments(per_chunk(h, g))

    chunks = cfg.chunks()
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    total = _Moments(0, 0.0, 0.0)
    for part in parts:
        total = _merge(total, part)
    return total


def simulate_success(params: SystemParams, policy: TaskPolicy, cfg: SimConfig = SimConfig()) -> MCEstimate:
    """Fraction of slots whose harvest covers the offload and CPU energy of a task split."""
    if policy.mode != "mu":
        raise ParameterError("simulate_success needs a task-split ('mu') policy")
    l_o, l_c = policy.offload_bits, policy.local_bits
    if l_o > 0 and policy.t_d == 0:
        raise InfeasiblePolicyError("offloading requires t_e < 1")
    e_c = float(local_energy(params, l_c))

    def per_chunk(h, g):
        harvested = harvested_energy(params, policy.t_e, h)
        if l_o > 0:
            # a zero uplink gain needs infinite energy and counts as a failure
            ok = g > 0
            e_o = np.full_like(g, np.inf)
            e_o[ok] = offload_energy(params, policy.t_d, l_o, g[ok])
        else:
            e_o = 0.0
        return (harvested >= e_o + e_c).astype(float)

    m = _run(cfg, per_chunk)
    p = m.mean
    return MCEstimate(p, float(np.sqrt(p * (1 - p) / m.count)), m.count)


def simulate_avg_bits(params: SystemParams, t_e: float, tau: float, cfg: SimConfig = SimConfig()) -> MCEstimate:
    """Mean of offloaded plus locally computed bits when a share ``tau`` of the harvest powers the uplink."""
    if not (0 <= t_e <= 1 and 0 <= tau <= 1):
        raise ParameterError("need t_e and tau in [0, 1]")
    if tau > 0 and t_e >= 1:
        raise InfeasiblePolicyError("an offload energy share tau > 0 requires t_e < 1")
    t_d = 1.0 - t_e

    def per_chunk(h, g):
        harvested = harvested_energy(params, t_e, h)
        bits = local_bits(params, (1.0 - tau) * harvested)
        if tau > 0:
            bits = bits + offload_bits(params, t_d, tau * harvested, g)
        return bits

    m = _run(cfg, per_chunk)
    stderr = float(np.sqrt(m.m2 / (m.count - 1) / m.count)) if m.count > 1 else float("inf")
    return MCEstimate(m.mean, stderr, m.count)


def simulate_deterministic_feasible(params: SystemParams, t_e: float, l_o: float, l_c: float) -> bool:
    """Whether the task fits the energy budget with |h| = |g| = 1."""
    if l_o + l_c == 0:
        return True
    if l_o > 0 and t_e >= 1:
        raise InfeasiblePolicyError("offloading requires t_e < 1")
    need = offload_energy(params, 1.0 - t_e, l_o, 1.0) + local_energy(params, l_c)
    return bool(harvested_energy(params, t_e, 1.0) >= need)
