import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthload import thermal
from synthload.activities import ActivityEvent
from synthload.config import default_sections
from synthload.core import EndUse
from synthload.enrichment import member_presence

from helpers import asleep_all_day, diary, dwelling, household

THERMAL = default_sections()["thermal"]


def test_deadband_is_free():
    assert thermal.hvac_hour(dwelling(), 72.0) == 0.0
    assert thermal.hvac_hour(dwelling(), 68.0) == 0.0
    assert thermal.hvac_hour(dwelling(), 76.0) == 0.0


def test_hvac_hand_value():
    # 20 F below the heating setpoint: 20 * (2000/30 + 1431.1/19) BTU/h
    assert thermal.hvac_hour(dwelling(), 48.0) == pytest.approx(0.8323, abs=1e-4)
    assert thermal.hvac_hour(dwelling(), 96.0) == pytest.approx(0.8323, abs=1e-4)


def test_efficiency_scales_load():
    assert thermal.hvac_hour(dwelling(heater_efficiency=0.5), 48.0) == pytest.approx(2 * thermal.hvac_hour(dwelling(), 48.0))


def test_no_ac_means_no_cooling():
    dw = dwelling(has_ac=False)
    assert thermal.hvac_hour(dw, 100.0) == 0.0
    assert thermal.hvac_hour(dw, 40.0) > 0.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-40, 120), min_size=24, max_size=24), st.booleans())
def test_vectorised_day_matches_hourly(temps, ac):
    dw = dwelling(has_ac=ac)
    day = thermal.hvac_day(dw, temps)
    assert np.allclose(day, [thermal.hvac_hour(dw, t) for t in temps], rtol=1e-12, atol=0)


def test_shower_hand_value():
    gallons = 2.25 * 7.81
    assert gallons == pytest.approx(17.5725)
    assert thermal.dhw_energy(gallons, 105.0, 55.0, 0.9) == pytest.approx(1.8451, abs=1e-4)


def test_warm_inlet_gives_zero_energy_but_water():
    rng = np.random.default_rng(0)
    for kind in thermal.DhwEventKind:
        g, kwh, _ = thermal.dhw_event(kind, 200.0, 0.9, rng)
        assert g > 0 and kwh == 0.0


def test_shower_mean_gallons_matches_clamped_oracle():
    n = 100_000
    rng = np.random.default_rng(123)
    sim = np.array([thermal.dhw_event(thermal.DhwEventKind.Shower, 55.0, 0.9, rng)[0] for _ in range(n)])
    o = np.random.default_rng(999)
    oracle = np.maximum(o.normal(2.25, 0.68, n), 0.05) * np.maximum(o.normal(7.81, 3.52, n), 1.0)
    assert sim.mean() == pytest.approx(oracle.mean(), rel=0.01)
    assert sim.mean() > 2.25 * 7.81  # clamping lifts the mean


def test_event_temperature_within_range():
    rng = np.random.default_rng(1)
    for kind in thermal.DhwEventKind:
        lo, hi = THERMAL["events"][kind.value]["t_hot_f"]
        for _ in range(50):
            assert lo <= thermal.dhw_event(kind, 50.0, 0.9, rng)[2] <= hi


def schedule(hh, events=(), params=None, seed=0):
    presence = [member_presence(m) for m in hh.members]
    return thermal.schedule_dhw_day(hh, presence, list(events), 55.0, params or THERMAL, np.random.default_rng(seed))


def test_nobody_home_no_events_is_zero():
    day = schedule(household([asleep_all_day()]))
    assert not day.kwh.any() and not day.gallons.any()


def test_one_shower_lands_in_an_occupied_hour():
    d = diary([(0, 600, "away"), (600, 720, "home"), (720, 1440, "away")])
    params = dict(THERMAL, p_bathe=1.0, p_bath=0.0)
    for seed in range(30):
        day = schedule(household([d]), params=params, seed=seed)
        hot = np.flatnonzero(day.kwh)
        assert hot.size == 1 and hot[0] in (10, 11)
        assert day.draws[0].kind is thermal.DhwEventKind.Shower


def test_gas_heater_books_water_not_energy():
    hh = household([diary([(0, 1440, "home")])], dw=dwelling(has_electric_water_heater=False))
    ev = ActivityEvent(EndUse.Dwasher, 19 * 60, 60.0, 900.0)
    day = schedule(hh, [ev], params=dict(THERMAL, p_bathe=1.0))
    assert day.kwh.sum() == 0.0 and day.gallons.sum() > 0.0


def test_appliance_draw_in_start_hour():
    hh = household([asleep_all_day()])
    ev = ActivityEvent(EndUse.Cwasher, 20 * 60 + 30, 45.0, 400.0)
    day = schedule(hh, [ev])
    assert np.flatnonzero(day.gallons).tolist() == [20]


@settings(max_examples=100, deadline=None)
@given(st.floats(33, 90), st.floats(0, 30), st.integers(0, 2**32 - 1))
def test_dhw_energy_nonincreasing_in_inlet_temp(t_cold, bump, seed):
    kind = thermal.DhwEventKind.Shower
    a = thermal.dhw_event(kind, t_cold, 0.9, np.random.default_rng(seed))[1]
    b = thermal.dhw_event(kind, t_cold + bump, 0.9, np.random.default_rng(seed))[1]
    assert b <= a
