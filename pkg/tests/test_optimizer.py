import numpy as np
import pytest

from wpmec.analytics import SuccessQuery, average_bits, success_probability
from wpmec.optimizer import GridSearch, maximize_t_e, optimize_avg_bits, optimize_success

# tau* at r = 25 m, B = 1 MHz on first run (local-dominant regime)
TAU_STAR_25M = 0.0


def test_empty_task(params):
    res = optimize_success(params, 0.0)
    assert res.best_value == 1.0
    assert res.best_point == (0.0, 0.0)


def test_small_task_prefers_local(params):
    res = optimize_success(params.replace(distance_m=15.0), 1e4)
    assert res.split == 0.0 and res.t_e == 1.0
    assert res.best_value == pytest.approx(res.baselines["local"].value, abs=0)


def test_large_task_offloads(params):
    res = optimize_success(params, 5e4)
    assert res.split > 0
    assert res.best_value > res.baselines["local"].value


def test_best_value_reproducible(params):
    p = params.replace(distance_m=8.0)
    res = optimize_success(p, 3e4)
    again = success_probability(SuccessQuery.build(p, 3e4, res.split, res.t_e))
    assert res.best_value == pytest.approx(again, abs=1e-9)
    bits = optimize_avg_bits(p)
    assert bits.best_value == pytest.approx(average_bits(p, bits.t_e, bits.split), rel=1e-12)


def test_dominates_baselines_and_grid(params):
    for r in (3.0, 12.0, 25.0):
        p = params.replace(distance_m=r)
        res = optimize_success(p, 2e4)
        for b in res.baselines.values():
            assert res.best_value >= b.value - 1e-9
        axis = np.linspace(0, 1, 41)
        mu, te = (a.ravel() for a in np.meshgrid(axis, axis, indexing="ij"))
        ok = ~((mu > 0) & (te >= 1))
        from wpmec.analytics import success_probability_grid

        assert res.best_value >= np.max(success_probability_grid(p, 2e4, mu[ok], te[ok])) - 1e-9


def test_deterministic(params):
    a = optimize_success(params, 3e4)
    b = optimize_success(params, 3e4)
    assert a == b


def test_history_nondecreasing(params):
    res = optimize_success(params.replace(distance_m=9.0), 4e4)
    assert np.all(np.diff(res.history) >= 0)
    assert res.evaluations > 41 * 41 - 41
    assert res.grid_resolution == pytest.approx(0.2**4 / 10)


def test_avg_bits_short_range(params):
    p = params.replace(distance_m=2.0)
    res = optimize_avg_bits(p)
    for t_e in (0.25, 0.75):
        assert res.best_value >= average_bits(p, t_e, 1.0)


def test_avg_bits_long_range(params):
    res = optimize_avg_bits(params.replace(distance_m=25.0))
    assert res.split < 0.5
    assert res.split == pytest.approx(TAU_STAR_25M, abs=1e-12)


def test_avg_bits_zero_power(params):
    assert optimize_avg_bits(params.replace(tx_power_watts=0.0)).best_value == 0.0


def test_maximize_t_e_quadratic():
    t, v = maximize_t_e(lambda x: -(x - 0.3137) ** 2, hi=1.0)
    assert t == pytest.approx(0.3137, abs=1e-4)
    assert v <= 0


def test_grid_search_finds_interior_max():
    point, value, _, _, history = GridSearch().maximize(lambda s, t: -((s - 0.42) ** 2) - (t - 0.77) ** 2)
    assert point == pytest.approx((0.42, 0.77), abs=2e-3)
    assert np.all(np.diff(history) >= 0)
