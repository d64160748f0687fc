"""Law of the harvested-energy variable H = theta1 |h|^2 + theta2 |h|^4 under Rayleigh fading.

|h|^2 is unit-mean exponential, so every quantity reduces to the positive root
of theta2 u^2 + theta1 u - x = 0. The survival function is written as

    P(H > x) = exp(-2x / (theta1 + sqrt(theta1^2 + 4 theta2 x)))

which is algebraically the same as exp((theta1 - sqrt(theta1^2 + 4 theta2 x)) / (2 theta2))
but has no 0/0 at theta2 = 0 and no cancellation when 4 theta2 x << theta1^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .model import SystemParams


@dataclass(frozen=True)
class HarvestDistribution:
    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        if not (self.theta1 >= 0 and self.theta2 >= 0 and self.theta1 + self.theta2 > 0):
            raise ParameterError(
                f"need theta1 >= 0, theta2 >= 0 and theta1 + theta2 > 0, got ({self.theta1}, {self.theta2})"
            )

    @classmethod
    def from_params(cls, p: SystemParams, t_e: float = 1.0) -> "HarvestDistribution":
        """Distribution of the energy harvested over ``t_e`` seconds at unit small-scale gain scale."""
        rx = p.tx_power_watts / p.pathloss
        return cls(t_e * p.gamma2 * rx, t_e * 1.5 * p.gamma4 * rx**2)

    def _root(self, x):
        # 2x / (theta1 + sqrt(theta1^2 + 4 theta2 x)): the |h|^2 that yields H = x,
        # divided through by sqrt(x) so nothing overflows near the top of the float range
        x = np.asarray(x, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            rx = np.sqrt(x)
            a = self.theta1 / rx
            u = 2.0 * rx / (a + np.hypot(a, 2.0 * np.sqrt(self.theta2)))
        u = np.where(x == 0, 0.0, u)
        return np.where(np.isinf(x), np.inf, u)

    def sf(self, x):
        """P(H > x)."""
        x = np.asarray(x, dtype=float)
        out = np.exp(-self._root(np.maximum(x, 0.0)))
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        """P(H <= x); zero for x <= 0."""
        x = np.asarray(x, dtype=float)
        out = -np.expm1(-self._root(np.maximum(x, 0.0)))
        return out[()] if out.ndim == 0 else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ParameterError("pdf is defined for x > 0 only")
        out = np.exp(-self._root(x)) / np.sqrt(self.theta1**2 + 4.0 * self.theta2 * x)
        return out[()] if out.ndim == 0 else out

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p >= 1)):
            raise ParameterError(f"quantile needs 0 <= p < 1, got {p}")
        t = -np.log1p(-p)
        out = self.transform(t)
        return out[()] if out.ndim == 0 else out

    def transform(self, u):
        """Map an |h|^2 value to the corresponding H value."""
        u = np.asarray(u, dtype=float)
        return self.theta1 * u + self.theta2 * u * u


@dataclass
class RngStream:
    """One independent, reproducible random stream keyed by ``(seed, stream_id)``.

    Backed by PCG64 seeded through ``SeedSequence(seed, spawn_key=(stream_id,))``,
    so streams never overlap and do not depend on which worker runs them.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.seed < 0 or self.stream_id < 0:
            raise ParameterError("seed and stream_id must be non-negative")
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))


def sample_h_gain(rng: RngStream, size: int | None = None):
    """Rayleigh power gains |h|^2 ~ Exp(1)."""
    return rng.generator.standard_exponential(size)


def sample_harvest(d: HarvestDistribution, rng: RngStream, size: int | None = None):
    return d.transform(sample_h_gain(rng, size))
