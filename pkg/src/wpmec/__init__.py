"""Success probability and expected throughput of a wirelessly powered edge device
that splits each task between offloading to the access point and local computation."""

from .analytics import (
    RangeResult,
    SuccessQuery,
    average_bits,
    local_range_at_confidence,
    r_max_deterministic,
    success_probability,
    success_probability_lower_bound,
)
from .distributions import HarvestDistribution, RngStream
from .errors import ConvergenceError, InfeasiblePolicyError, ParameterError
from .model import SystemParams, TaskPolicy
from .montecarlo import SimConfig, simulate_avg_bits, simulate_success
from .optimizer import optimize_avg_bits, optimize_success

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "HarvestDistribution",
    "InfeasiblePolicyError",
    "ParameterError",
    "RangeResult",
    "RngStream",
    "SimConfig",
    "SuccessQuery",
    "SystemParams",
    "TaskPolicy",
    "average_bits",
    "local_range_at_confidence",
    "optimize_avg_bits",
    "optimize_success",
    "r_max_deterministic",
    "simulate_avg_bits",
    "simulate_success",
    "success_probability",
    "success_probability_lower_bound",
]
