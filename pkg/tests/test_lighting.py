import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthload import lighting
from synthload.config import default_sections

PARAMS = default_sections()["lighting"]
TABLE = PARAMS["effective_occupancy"]


def test_effective_occupancy_table():
    assert lighting.effective_occupancy(0, TABLE) == 0.0
    assert lighting.effective_occupancy(1, TABLE) == 1.0
    assert lighting.effective_occupancy(4, TABLE) == 1.90
    # linear extension of the last segment
    assert lighting.effective_occupancy(6, TABLE) == pytest.approx(1.90 + 2 * 0.20)


def test_occupancy_table_needs_one():
    with pytest.raises(lighting.TableMissingOne):
        lighting.effective_occupancy(2, {"2": 1.4})


def test_bulb_weights():
    assert lighting.bulb_weights(1).tolist() == [1.0]
    assert lighting.bulb_weights(2) == pytest.approx([0.7304, 0.2696], abs=1e-4)


@given(st.integers(1, 300))
def test_bulb_weights_normalised_and_decreasing(n):
    w = lighting.bulb_weights(n)
    assert abs(w.sum() - 1.0) < 1e-12
    assert np.all(np.diff(w) < 0) or n == 1


def test_log_weight_sum_matches_direct_sum():
    for n in (1, 2, 7, 40):
        assert lighting.log_weight_sum(n) == pytest.approx(sum(np.log((n + 1) / r) for r in range(1, n + 1)))


def state_with(weights, threshold=60.0):
    st_ = lighting.new_day(np.full(len(weights), 60.0), PARAMS, np.random.default_rng(0))
    st_.weights = np.asarray(weights, dtype=float)
    st_.irr_threshold = threshold
    return st_


def test_bright_hour_has_zero_switch_on_probability():
    s = state_with([0.5, 0.5])
    assert not lighting.switch_on_probability(s, 100.0, 3, 1.0).any()


def test_switch_on_probability_product():
    s = state_with([0.2, 0.8])
    p = lighting.switch_on_probability(s, 10.0, 2, 0.05)
    assert p[0] == pytest.approx(0.2 * 1.44 * 0.05)
    # the documented worked product: weight 0.2, occupancy multiplier 1.5, gamma 0.05
    assert 0.2 * 1.5 * 0.05 == pytest.approx(0.015)


def test_probability_clamped_to_one():
    s = state_with([0.5, 0.5])
    assert lighting.switch_on_probability(s, 0.0, 4, 1e3).tolist() == [1.0, 1.0]


def test_bright_hour_energy_only_from_carry_over():
    s = state_with([1.0])
    s.remaining_on_min = np.array([90.0])
    e1 = lighting.step_hour(s, 500.0, 2, 1e3, np.random.default_rng(1))
    e2 = lighting.step_hour(s, 500.0, 2, 1e3, np.random.default_rng(2))
    e3 = lighting.step_hour(s, 500.0, 2, 1e3, np.random.default_rng(3))
    assert (e1, e2, e3) == pytest.approx((0.06, 0.03, 0.0))


def test_empty_house_uses_no_light():
    e = lighting.simulate_day([60.0] * 10, np.zeros(24), np.zeros(24, dtype=int), PARAMS, np.random.default_rng(0), gamma=1e3)
    assert not e.any()


def test_no_bulbs():
    e = lighting.simulate_day([], np.zeros(24), np.ones(24, dtype=int), PARAMS, np.random.default_rng(0))
    assert e.shape == (24,) and not e.any()


def test_duration_pmf_geometric():
    minutes, pmf = lighting.duration_pmf({"duration_minutes": [1, 15, 30], "duration_decay": 0.5})
    assert pmf == pytest.approx(np.array([4, 2, 1]) / 7)
    assert minutes.tolist() == [1, 15, 30]


def test_duration_draw_frequencies():
    s = state_with([1.0])
    minutes, pmf = lighting.duration_pmf(PARAMS)
    n = 50_000
    drawn = lighting.durations_from_uniforms(s, np.random.default_rng(5).random(n))
    freq = np.array([(drawn == m).mean() for m in minutes])
    assert freq == pytest.approx(pmf, abs=0.01)


def test_replay_identical():
    irr = np.r_[np.zeros(7), np.full(11, 400.0), np.zeros(6)]
    occ = np.r_[np.zeros(7), np.ones(17)].astype(int)
    a = lighting.simulate_day([60, 14, 9], irr, occ, PARAMS, np.random.default_rng(11), gamma=5.0)
    b = lighting.simulate_day([60, 14, 9], irr, occ, PARAMS, np.random.default_rng(11), gamma=5.0)
    assert np.array_equal(a, b)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(0, 200), min_size=24, max_size=24),
    st.lists(st.floats(0, 200), min_size=24, max_size=24),
    st.integers(0, 2**32 - 1),
)
def test_more_daylight_never_adds_energy(irr, extra, seed):
    params = PARAMS
    occ = np.full(24, 2)
    watts = [60.0, 60.0, 14.0, 9.0, 9.0]
    low = lighting.simulate_day(watts, irr, occ, params, np.random.default_rng(seed), gamma=3.0).sum()
    high = lighting.simulate_day(watts, np.add(irr, extra), occ, params, np.random.default_rng(seed), gamma=3.0).sum()
    assert high <= low + 1e-12


def test_skip_mode_does_not_relight_lit_bulbs():
    s = state_with([1.0])
    s.relight = "skip"
    s.remaining_on_min = np.array([30.0])
    lighting.step_hour(s, 0.0, 1, 1e3, np.random.default_rng(0))
    assert s.remaining_on_min[0] == 0.0
