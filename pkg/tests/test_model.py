import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import reference_params
from wpmec.errors import InfeasiblePolicyError, ParameterError
from wpmec.model import (
    ChannelDraw,
    SystemParams,
    TaskPolicy,
    db_to_watts,
    energy_budget,
    harvested_energy,
    local_bits,
    local_energy,
    offload_bits,
    offload_energy,
)


def test_harvested_energy_hand_value(params):
    expected = 0.5 * (0.0034e-3 + 1.5 * 0.3829e-6)
    assert harvested_energy(params, 0.5, 1.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.98718e-6, rel=1e-5)


@pytest.mark.parametrize("t_e,h", [(0.0, 3.0), (0.7, 0.0)])
def test_harvested_energy_zero(params, t_e, h):
    assert harvested_energy(params, t_e, h) == 0.0


def test_harvested_energy_monotone(params):
    h = np.linspace(0, 5, 50)
    e = harvested_energy(params, 0.5, h)
    assert np.all(np.diff(e) > 0)
    far = harvested_energy(params.replace(distance_m=20.0), 0.5, h[1:])
    assert np.all(far < e[1:])
    assert harvested_energy(params, 0.8, 1.0) == pytest.approx(1.6 * harvested_energy(params, 0.5, 1.0))


def test_offload_energy_hand_value(params):
    assert offload_energy(params, 0.5, 1e4, 1.0) == pytest.approx(0.5 * (2**0.02 - 1) * 1e-8 * 1e3, rel=1e-13)
    assert offload_energy(params, 0.5, 1e4, 1.0) == pytest.approx(6.9804e-8, rel=1e-4)


def test_offload_energy_convex(params):
    e1 = offload_energy(params, 0.5, 1e4, 1.0)
    e2 = offload_energy(params, 0.5, 2e4, 1.0)
    assert e2 > 2 * e1
    assert offload_energy(params, 0.5, 0.0, 1.0) == 0.0


def test_offload_bits_trivial(params):
    assert offload_bits(params, 0.5, 0.0, 1.0) == 0.0
    assert offload_bits(params, 0.0, 1e-6, 1.0) == 0.0


def test_offload_round_trip(params):
    e = offload_energy(params, 0.5, 1e4, 1.0)
    assert offload_bits(params, 0.5, e, 1.0) == pytest.approx(1e4, rel=1e-13)


@pytest.mark.parametrize("t_d,g", [(0.0, 1.0), (0.5, 0.0)])
def test_offload_energy_infeasible(params, t_d, g):
    with pytest.raises(InfeasiblePolicyError):
        offload_energy(params, t_d, 10.0, g)


def test_local_energy_values(params):
    assert local_energy(params, 0.0) == 0.0
    assert local_energy(params, 1e4) == pytest.approx(1e-7, rel=1e-13)
    assert local_energy(params, 5e4) == pytest.approx(1.25e-5, rel=1e-13)
    assert local_bits(params, 0.0) == 0.0
    assert local_bits(params, 1e-7) == pytest.approx(1e4, rel=1e-13)
    assert local_bits(params, local_energy(params, 31337.0)) == pytest.approx(31337.0, rel=1e-13)


def test_db_to_watts():
    assert db_to_watts(0.0, "dBW") == 1.0
    assert db_to_watts(-50.0, "dBm") == pytest.approx(1e-8, rel=1e-14)
    assert db_to_watts(30.0, "dBm") == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ParameterError):
        db_to_watts(0.0, "dB")
    with pytest.raises(ParameterError):
        db_to_watts(float("nan"))


@pytest.mark.parametrize(
    "changes",
    [
        {"distance_m": 0.0},
        {"pathloss_exp": 2.0},
        {"noise_watts": 0.0},
        {"bandwidth_hz": -1.0},
        {"gamma2": -1.0},
        {"gamma2": 0.0, "gamma4": 0.0},
        {"cpu_cap_coeff": 0.0},
        {"cycles_per_bit": 0.5},
        {"tx_power_watts": -1.0},
    ],
)
def test_system_params_invariants(changes):
    with pytest.raises(ParameterError):
        reference_params(**changes)


def test_system_params_defaults_match_reference():
    assert SystemParams() == reference_params()


def test_policy_validation():
    with pytest.raises(InfeasiblePolicyError):
        TaskPolicy(1e4, 1.0, "mu", 0.5)
    with pytest.raises(InfeasiblePolicyError):
        TaskPolicy(1e4, 1.0, "tau", 0.5)
    with pytest.raises(ParameterError):
        TaskPolicy(-1.0, 0.5)
    with pytest.raises(ParameterError):
        TaskPolicy(1.0, 1.5)
    with pytest.raises(ParameterError):
        TaskPolicy(1.0, 0.5, "nu", 0.1)
    # nothing to offload: t_e = 1 is fine
    TaskPolicy(0.0, 1.0, "mu", 0.5)
    p = TaskPolicy(1e4, 0.25, "mu", 0.3)
    assert (p.t_d, p.offload_bits, p.local_bits) == (0.75, 3000.0, 7000.0)


def test_energy_budget(params):
    budget = energy_budget(params, TaskPolicy(1e4, 0.5, "mu", 0.5), ChannelDraw(1.0, 1.0))
    assert budget.harvested_j == pytest.approx(harvested_energy(params, 0.5, 1.0))
    assert budget.offload_j == pytest.approx(offload_energy(params, 0.5, 5e3, 1.0))
    assert budget.local_j == pytest.approx(local_energy(params, 5e3))
    tau = energy_budget(params, TaskPolicy(1e4, 0.5, "tau", 0.25), ChannelDraw(2.0, 1.0))
    assert tau.offload_j + tau.local_j == pytest.approx(tau.harvested_j)
    assert tau.feasible


pos = st.floats(min_value=1e-3, max_value=1e3)
frac = st.floats(min_value=0.01, max_value=0.99)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(1.0, 40.0), t_d=frac, bits=st.floats(1.0, 2e5), g=st.floats(1e-3, 20.0))
def test_offload_inverse_property(r, t_d, bits, g):
    p = reference_params(distance_m=r)
    e = offload_energy(p, t_d, bits, g)
    assert offload_bits(p, t_d, e, g) == pytest.approx(bits, rel=1e-12)
    e_back = offload_energy(p, t_d, offload_bits(p, t_d, e, g), g)
    assert e_back == pytest.approx(e, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(bits=st.one_of(st.just(0.0), st.floats(1e-3, 1e7)), xi=st.floats(1e-30, 1e-26), psi=st.floats(1.0, 1e4))
def test_local_inverse_property(bits, xi, psi):
    p = reference_params(cpu_cap_coeff=xi, cycles_per_bit=psi)
    assert local_bits(p, local_energy(p, bits)) == pytest.approx(bits, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.5, 100.0), t_e=st.floats(0.0, 1.0), h=st.floats(0.0, 50.0), e=st.floats(0.0, 1.0),
       g=st.floats(0.0, 50.0))
def test_outputs_nonnegative(r, t_e, h, e, g):
    p = reference_params(distance_m=r)
    assert harvested_energy(p, t_e, h) >= 0
    assert offload_bits(p, 1 - t_e, e, g) >= 0
    assert local_bits(p, e) >= 0
    assert not math.isnan(float(offload_bits(p, 1 - t_e, e, g)))
