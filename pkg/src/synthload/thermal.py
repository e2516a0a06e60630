"""Thermostatically controlled loads: space conditioning and water heating."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from synthload import dists
from synthload.config import DEFAULTS
from synthload.core import HOURS, ClimateZone, Dwelling, EndUse

BTU_PER_KWH = 3412.14
KWH_PER_GAL_DEGF = 0.00189


def hvac_hour(dwelling: Dwelling, t_out: float, btu_per_kwh: float = BTU_PER_KWH) -> float:
    """Electric energy (kWh) to hold the violated setpoint for one hour.

    Conductive load is dT/eta * (floor/R_roof + wall/R_wall) in BTU/h.  No
    cooling is delivered when the dwelling has no air conditioner.
    """
    if t_out < dwelling.setpoint_heat:
        dT, eta = dwelling.setpoint_heat - t_out, dwelling.heater_efficiency
    elif t_out > dwelling.setpoint_cool:
        if not dwelling.has_ac:
            return 0.0
        dT, eta = t_out - dwelling.setpoint_cool, dwelling.hvac_efficiency
    else:
        return 0.0
    ua = dwelling.floor_area / dwelling.r_roof + dwelling.wall_area / dwelling.r_wall
    return dT / eta * ua / btu_per_kwh


def hvac_day(dwelling: Dwelling, temps_f: Sequence[float], btu_per_kwh: float = BTU_PER_KWH) -> np.ndarray:
    """Vectorised ``hvac_hour`` over a 24 h temperature series."""
    t = np.asarray(temps_f, dtype=float)
    ua = dwelling.floor_area / dwelling.r_roof + dwelling.wall_area / dwelling.r_wall
    heat = np.clip(dwelling.setpoint_heat - t, 0.0, None) / dwelling.heater_efficiency
    cool = np.clip(t - dwelling.setpoint_cool, 0.0, None) / dwelling.hvac_efficiency
    if not dwelling.has_ac:
        cool = np.zeros_like(cool)
    return (heat + cool) * ua / btu_per_kwh


class DhwEventKind(enum.Enum):
    Shower = "Shower"
    Bath = "Bath"
    Dishwasher = "Dishwasher"
    ClothesWasher = "ClothesWasher"


APPLIANCE_DRAWS = {EndUse.Dwasher: DhwEventKind.Dishwasher, EndUse.Cwasher: DhwEventKind.ClothesWasher}


@dataclass(frozen=True)
class DhwDraw:
    kind: DhwEventKind
    hour: int
    gallons: float
    kwh: float
    t_hot: float


def dhw_energy(gallons: float, t_hot: float, t_cold: float, eta: float, kwh_per_gal_degf: float = KWH_PER_GAL_DEGF) -> float:
    """Heater energy (kWh) to lift ``gallons`` from inlet to use temperature."""
    return gallons * max(0.0, t_hot - t_cold) / eta * kwh_per_gal_degf


def dhw_event(
    kind: DhwEventKind, t_cold: float, eta: float, rng: np.random.Generator, params: Mapping | None = None
) -> tuple[float, float, float]:
    """One hot-water draw: returns (gallons, kWh, hot-water temperature used).

    ``params`` is the ``thermal`` config section.  Flow and duration are
    floored at their minimums; the temperature lift never goes negative.
    """
    if params is None:
        params = DEFAULTS["thermal"]
    ev = params["events"][kind.value]
    flow = max(float(dists.draw(ev["flow_gpm"], rng)), params["min_flow_gpm"])
    duration = max(float(dists.draw(ev["duration_min"], rng)), params["min_duration_min"])
    lo, hi = ev["t_hot_f"]
    t_hot = float(rng.uniform(lo, hi))
    gallons = flow * duration
    return gallons, dhw_energy(gallons, t_hot, t_cold, eta, params["kwh_per_gal_degf"]), t_hot


@dataclass(frozen=True)
class DhwDay:
    gallons: np.ndarray
    kwh: np.ndarray
    draws: tuple[DhwDraw, ...]
    dropped: int = 0


def schedule_dhw_day(
    household,
    presence: Sequence[np.ndarray],
    events: Sequence,
    t_cold: float,
    params: Mapping,
    rng: np.random.Generator,
) -> DhwDay:
    """Place the day's bathing and appliance hot-water draws.

    ``presence`` holds one boolean 24-vector per member (home and awake).
    Each member bathes with probability ``p_bathe`` in a uniformly chosen
    present hour; dishwasher and clothes-washer events draw hot water in
    their start hour.  Households without an electric water heater use the
    water but book no energy.
    """
    dwelling = household.dwelling
    eta = dwelling.water_heater_efficiency
    electric = dwelling.has_electric_water_heater
    gallons = np.zeros(HOURS)
    kwh = np.zeros(HOURS)
    draws = []
    dropped = 0

    def book(kind, hour):
        g, e, t_hot = dhw_event(kind, t_cold, eta, rng, params)
        e = e if electric else 0.0
        gallons[hour] += g
        kwh[hour] += e
        draws.append(DhwDraw(kind, hour, g, e, t_hot))

    for mask in presence:
        bathes = rng.random() < params["p_bathe"]
        kind = DhwEventKind.Bath if rng.random() < params["p_bath"] else DhwEventKind.Shower
        hours = np.flatnonzero(mask)
        if not bathes:
            continue
        if hours.size == 0:
            dropped += 1
            continue
        book(kind, int(hours[rng.integers(hours.size)]))
    for ev in events:
        kind = APPLIANCE_DRAWS.get(ev.activity)
        if kind is not None:
            book(kind, ev.start_hour)
    return DhwDay(gallons, kwh, tuple(draws), dropped)
