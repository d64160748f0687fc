import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import reference_params
from wpmec.analytics import (
    FADING_BENEFIT_THRESHOLD,
    SuccessQuery,
    average_bits,
    average_bits_grid,
    average_bits_split,
    fading_extends_range,
    local_range_at_confidence,
    local_range_at_confidence_closed_form,
    local_range_closed_form,
    local_success_closed_form,
    r_max_deterministic,
    range_cubic,
    success_probability,
    success_probability_grid,
    success_probability_lower_bound,
    success_probability_lower_bound_grid,
)
from wpmec.errors import InfeasiblePolicyError, ParameterError
from wpmec.model import TaskPolicy, harvested_energy, local_energy, offload_energy
from wpmec.montecarlo import SimConfig, simulate_deterministic_feasible, simulate_success

# relative gap between exact and bound at r = 2 m, l = 1e3, B = 1e5 over mu, t_e in
# {0, .5, 1} x {.25, .5, .75} peaked at 1.4e-5 on first measurement
BOUND_TIGHTNESS_REL_GAP = 1e-4


def q(params, bits, mu, t_e):
    return SuccessQuery.build(params, bits, mu, t_e)


def test_zero_task_is_certain(params):
    assert success_probability(q(params, 0.0, 0.5, 0.5)) == 1.0
    assert success_probability(q(params, 0.0, 0.0, 1.0)) == 1.0
    assert success_probability_lower_bound(q(params, 0.0, 1.0, 0.5)) == 1.0


def test_query_phis(params):
    query = q(params, 1e4, 1.0, 0.5)
    assert query.phi_o == pytest.approx((2**0.02 - 1) * 0.5 * 1e-8 * 1e3, rel=1e-13)
    assert query.phi_c == 0.0
    local = q(params, 1e4, 0.0, 1.0)
    assert local.phi_o == 0.0
    assert local.phi_c == pytest.approx(1e-7, rel=1e-13)


def test_local_closed_form_matches(params):
    for r in (1.0, 5.0, 10.0, 20.0):
        p = params.replace(distance_m=r)
        for bits in (1e3, 1e4, 5e4):
            assert success_probability(q(p, bits, 0.0, 1.0)) == pytest.approx(local_success_closed_form(p, bits), abs=1e-12)


def test_mc_spot_value(params):
    exact = success_probability(q(params, 1e4, 1.0, 0.5))
    mc = simulate_success(params, TaskPolicy(1e4, 0.5, "mu", 1.0), SimConfig(1_000_000, 3))
    assert abs(exact - mc.estimate) <= 0.01
    assert mc.agrees_with(exact)


def test_infeasible_policy(params):
    with pytest.raises(InfeasiblePolicyError):
        success_probability_grid(params, 1e4, 0.5, 1.0)
    with pytest.raises(InfeasiblePolicyError):
        average_bits(params, 1.0, 0.5)


def test_zero_power(params):
    p = params.replace(tx_power_watts=0.0)
    assert success_probability(q(p, 1e4, 0.5, 0.5)) == 0.0
    assert success_probability(q(p, 0.0, 0.5, 0.5)) == 1.0
    assert average_bits(p, 0.5, 0.5) == 0.0


def test_bound_below_exact_grid(narrowband):
    r = np.linspace(1, 30, 20)
    bits = np.linspace(1e3, 5e4, 20)
    for mu, t_e in ((1.0, 0.5), (0.5, 0.5), (0.0, 1.0), (0.3, 0.8)):
        for radius in r:
            p = narrowband.replace(distance_m=radius)
            exact = success_probability_grid(p, bits, mu, t_e)
            bound = success_probability_lower_bound_grid(p, bits, mu, t_e)
            assert np.all(bound <= exact + 1e-9)


def test_bound_tightness(narrowband):
    p = narrowband.replace(distance_m=2.0)
    for mu in (0.0, 0.5, 1.0):
        for t_e in (0.25, 0.5, 0.75):
            exact = success_probability(q(p, 1e3, mu, t_e))
            bound = success_probability_lower_bound(q(p, 1e3, mu, t_e))
            assert (exact - bound) / exact <= BOUND_TIGHTNESS_REL_GAP


def test_bound_small_argument_limit(params):
    assert success_probability_lower_bound(q(params, 1e-6, 1.0, 0.5)) == pytest.approx(1.0, abs=1e-9)


def test_bound_independent_of_gamma4(params):
    other = params.replace(gamma4=params.gamma4 * 10)
    for bits, mu, t_e in ((1e4, 1.0, 0.5), (5e4, 0.5, 0.3), (2e4, 0.0, 1.0)):
        a = success_probability_lower_bound(q(params, bits, mu, t_e))
        b = success_probability_lower_bound(q(other, bits, mu, t_e))
        assert a == pytest.approx(b, abs=1e-12)


def test_monotonicity(params):
    r = np.linspace(1, 40, 60)
    for mu, t_e in ((0.0, 1.0), (0.5, 0.5), (1.0, 0.3)):
        vals = [success_probability_grid(params.replace(distance_m=x), 2e4, mu, t_e) for x in r]
        assert np.all(np.diff(vals) <= 1e-9)
        bits = np.linspace(0, 1e5, 50)
        assert np.all(np.diff(success_probability_grid(params, bits, mu, t_e)) <= 1e-9)
    for field, values, sign in (
        ("noise_watts", np.logspace(-10, -6, 20), -1),
        ("tx_power_watts", np.linspace(0.1, 3.0, 20), 1),
        ("bandwidth_hz", np.logspace(4, 7, 20), 1),
    ):
        vals = [success_probability_grid(params.replace(**{field: v}), 2e4, 0.7, 0.5) for v in values]
        assert np.all(sign * np.diff(vals) >= -1e-9)


@settings(max_examples=150, deadline=None)
@given(r=st.floats(0.5, 60.0), bits=st.floats(0.0, 2e5), mu=st.floats(0.0, 1.0), t_e=st.floats(0.0, 0.999),
       bw=st.floats(1e4, 1e7))
def test_probability_range(r, bits, mu, t_e, bw):
    p = reference_params(distance_m=r, bandwidth_hz=bw)
    value = success_probability(q(p, bits, mu, t_e))
    assert 0.0 <= value <= 1.0
    assert success_probability_lower_bound(q(p, bits, mu, t_e)) <= value + 1e-9


def test_average_bits_endpoints(params):
    off, loc = average_bits_split(params, 0.5, 1.0)
    assert loc == 0.0 and off > 0
    off, loc = average_bits_split(params, 0.5, 0.0)
    assert off == 0.0 and loc > 0
    assert average_bits(params, 0.0, 0.5) == 0.0
    assert average_bits(params, 1.0, 0.0) > 0


def test_average_bits_continuous_in_tau(params):
    eps = [1e-6, 1e-9, 1e-12, 1e-15]
    for t_e in (0.25, 0.75):
        lo = [abs(average_bits(params, t_e, e) - average_bits(params, t_e, 0.0)) for e in eps]
        hi = [abs(average_bits(params, t_e, 1 - e) - average_bits(params, t_e, 1.0)) for e in eps]
        assert np.all(np.diff(lo) < 0) and np.all(np.diff(hi) < 0)
        # the local share vanishes like (1 - tau)^(1/3)
        assert lo[-1] / average_bits(params, t_e, 0.0) <= 1e-9
        assert hi[-1] / average_bits(params, t_e, 1.0) <= 1e-5


def test_average_bits_grid_matches_scalar(params):
    t_e = np.array([0.2, 0.5, 0.8])
    tau = np.array([0.0, 0.5, 1.0])
    grid = average_bits_grid(params, t_e[:, None], tau[None, :])
    for i, a in enumerate(t_e):
        for j, b in enumerate(tau):
            assert grid[i, j] == pytest.approx(average_bits(params, a, b), rel=1e-12)


def test_average_bits_local_term_closed_form(params):
    # E[H^(1/3)] with H = theta1 u + theta2 u^2; for theta2 = 0 it is theta1^(1/3) Gamma(4/3)
    p = params.replace(gamma4=0.0)
    theta1 = p.gamma2 * p.tx_power_watts / p.pathloss
    expected = (1.0 / p.cpu_energy_per_bit3) ** (1 / 3) * theta1 ** (1 / 3) * math.gamma(4 / 3)
    assert average_bits(p, 1.0, 0.0) == pytest.approx(expected, rel=1e-9)


def test_average_bits_offload_term_linear_harvester(params):
    # gamma4 = 0, t_e = 0.5, tau = 1: t_d B E[log2(1 + c u g)] with u, g ~ Exp(1) and c = 0.34,
    # from a 2-D mpmath integral (20 digits)
    off, loc = average_bits_split(params.replace(gamma4=0.0), 0.5, 1.0)
    assert loc == 0.0
    assert off == pytest.approx(171891.87034166107328, rel=1e-9)


def test_r_max_bracketing(params):
    rng = np.random.default_rng(9)
    for _ in range(50):
        p = params.replace(bandwidth_hz=10 ** rng.uniform(5, 6.5))
        t_e = rng.uniform(0.1, 0.9)
        mu = rng.uniform(0, 1)
        bits = 10 ** rng.uniform(3, 4.7)
        res = r_max_deterministic(p, t_e, mu * bits, (1 - mu) * bits)
        assert res.residual <= 1e-9
        assert simulate_deterministic_feasible(p.replace(distance_m=0.99 * res.r_max_m), t_e, mu * bits, (1 - mu) * bits)
        assert not simulate_deterministic_feasible(p.replace(distance_m=1.01 * res.r_max_m), t_e, mu * bits, (1 - mu) * bits)


def test_r_max_energy_balance(params):
    res = r_max_deterministic(params, 0.4, 6e3, 4e3)
    p = params.replace(distance_m=res.r_max_m)
    harvested = harvested_energy(p, 0.4, 1.0)
    needed = offload_energy(p, 0.6, 6e3, 1.0) + local_energy(p, 4e3)
    assert harvested == pytest.approx(needed, rel=1e-10)


def test_r_max_local_branch(params):
    for bits in (1e3, 1e4, 5e4, 1e5):
        res = r_max_deterministic(params, 1.0, 0.0, bits)
        assert res.root_alpha == pytest.approx(local_range_closed_form(params, bits), rel=1e-10)


def test_r_max_linear_harvester(params):
    p = params.replace(gamma4=0.0)
    res = r_max_deterministic(p, 0.5, 1e4, 0.0)
    a, _, c, _ = range_cubic(p, 0.5, 1e4, 0.0)
    assert res.root_alpha == pytest.approx(math.sqrt(-c / a), rel=1e-12)


def test_r_max_errors(params):
    with pytest.raises(ParameterError):
        r_max_deterministic(params, 0.5, 0.0, 0.0)
    with pytest.raises(InfeasiblePolicyError):
        r_max_deterministic(params, 1.0, 10.0, 0.0)
    with pytest.raises(InfeasiblePolicyError):
        r_max_deterministic(params, 0.999999, 1e6, 0.0)


def test_range_cubic_signs(params):
    a, b, c, d = range_cubic(params, 0.3, 1e4, 1e4)
    assert a > 0 and b > 0 and c < 0 and d < 0


def test_confidence_inversion(params):
    bits = 2e4
    r_max = r_max_deterministic(params, 1.0, 0.0, bits).r_max_m
    assert local_range_at_confidence(params, bits, math.exp(-1)) == pytest.approx(r_max, rel=1e-9)
    assert local_range_at_confidence(params, bits, 0.9) < r_max
    for delta in (0.1, 0.3679, 0.9):
        r = local_range_at_confidence(params, bits, delta)
        assert success_probability(q(params.replace(distance_m=r), bits, 0.0, 1.0)) == pytest.approx(delta, abs=1e-9)
        assert local_range_at_confidence_closed_form(params, bits, delta) == pytest.approx(r, rel=1e-9)
    for bad in (0.0, 1.0, -0.5):
        with pytest.raises(ParameterError):
            local_range_at_confidence(params, bits, bad)


def test_fading_threshold(params):
    assert FADING_BENEFIT_THRESHOLD == pytest.approx(0.367879441171, abs=1e-12)
    for delta, expect in ((0.2, True), (0.36, True), (0.38, False), (0.9, False)):
        assert fading_extends_range(params, 1e4, delta) is expect
