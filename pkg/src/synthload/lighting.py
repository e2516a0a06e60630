"""Stochastic lighting: hourly switch-on draws per bulb, gated by daylight and occupancy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from synthload.core import HOURS


class TableMissingOne(ValueError):
    pass


def occupancy_table(raw: Mapping) -> dict[int, float]:
    table = {int(k): float(v) for k, v in raw.items()}
    if table.get(1) != 1.0:
        raise TableMissingOne("effective-occupancy table must map 1 active occupant to 1.0")
    return dict(sorted(table.items()))


def effective_occupancy(n_active: int, table: Mapping) -> float:
    """Sub-linear lighting multiplier for ``n_active`` awake occupants.

    Interior gaps are interpolated; beyond the largest key the last segment
    is extended linearly.
    """
    if n_active < 0:
        raise ValueError(f"negative occupancy {n_active}")
    tab = occupancy_table(table)
    if n_active == 0:
        return 0.0
    if n_active in tab:
        return tab[n_active]
    keys = [0] + list(tab)
    vals = [0.0] + list(tab.values())
    if n_active > keys[-1]:
        slope = (vals[-1] - vals[-2]) / (keys[-1] - keys[-2])
        return vals[-1] + slope * (n_active - keys[-1])
    return float(np.interp(n_active, keys, vals))


def bulb_weights(n_bulbs: int) -> np.ndarray:
    """Relative usage of bulbs by rank: w_r proportional to ln((n+1)/r)."""
    if n_bulbs < 1:
        raise ValueError("need at least one bulb")
    r = np.arange(1, n_bulbs + 1)
    w = np.log((n_bulbs + 1) / r)
    return w / w.sum()


def duration_pmf(params: Mapping) -> tuple[np.ndarray, np.ndarray]:
    minutes = np.asarray(params["duration_minutes"], dtype=float)
    if "duration_weights" in params:
        w = np.asarray(params["duration_weights"], dtype=float)
    else:
        w = float(params["duration_decay"]) ** np.arange(minutes.size)
    return minutes, w / w.sum()


@dataclass
class LightingState:
    watts: np.ndarray
    weights: np.ndarray
    remaining_on_min: np.ndarray
    irr_threshold: float
    durations: np.ndarray
    duration_cdf: np.ndarray
    occupancy: dict
    relight: str = "extend"


def new_day(watts: Sequence[float], params: Mapping, rng: np.random.Generator) -> LightingState:
    """Draw the household's irradiance threshold for the day and reset all bulbs."""
    watts = np.asarray(watts, dtype=float)
    thr = params["threshold_w_m2"]
    threshold = float(rng.normal(thr["mu"], thr["sigma"]))
    minutes, pmf = duration_pmf(params)
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return LightingState(
        watts=watts,
        weights=bulb_weights(watts.size) if watts.size else np.zeros(0),
        remaining_on_min=np.zeros(watts.size),
        irr_threshold=threshold,
        durations=minutes,
        duration_cdf=cdf,
        occupancy=occupancy_table(params["effective_occupancy"]),
        relight=params.get("relight", "extend"),
    )


def switch_on_probability(state: LightingState, irr_t: float, n_active: int, gamma: float) -> np.ndarray:
    if irr_t > state.irr_threshold or n_active < 1:
        return np.zeros(state.weights.size)
    return np.clip(state.weights * effective_occupancy(n_active, state.occupancy) * gamma, 0.0, 1.0)


def durations_from_uniforms(state: LightingState, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF lookup of switch-on durations (minutes)."""
    idx = np.searchsorted(state.duration_cdf, u, side="right").clip(max=state.durations.size - 1)
    return state.durations[idx]


def step_hour(state: LightingState, irr_t: float, n_active: int, gamma: float, rng: np.random.Generator) -> float:
    """Advance one hour; returns lighting kWh for the hour.

    Exactly two uniforms per bulb are consumed every hour whatever the
    outcome, so two runs sharing a seed see the same random numbers.
    """
    n = state.watts.size
    u_on = rng.random(n)
    u_dur = rng.random(n)
    ignite = u_on < switch_on_probability(state, irr_t, n_active, gamma)
    if state.relight == "skip":
        ignite &= state.remaining_on_min <= 0
    drawn = durations_from_uniforms(state, u_dur)
    rem = np.where(ignite, np.maximum(state.remaining_on_min, drawn), state.remaining_on_min)
    kwh = float(np.dot(state.watts, np.minimum(rem, 60.0))) / 60.0 / 1000.0
    state.remaining_on_min = np.maximum(rem - 60.0, 0.0)
    return kwh


def simulate_day(
    watts: Sequence[float],
    irradiance: Sequence[float],
    occupancy: Sequence[int],
    params: Mapping,
    rng: np.random.Generator,
    gamma: float | None = None,
) -> np.ndarray:
    gamma = params["gamma"] if gamma is None else gamma
    state = new_day(watts, params, rng)
    return np.array([step_hour(state, irradiance[t], int(occupancy[t]), gamma, rng) for t in range(HOURS)])


def mean_duration(params: Mapping) -> float:
    minutes, pmf = duration_pmf(params)
    return float(minutes @ pmf)


def log_weight_sum(n: int) -> float:
    """Normaliser of the rank weights, sum_r ln((n+1)/r)."""
    return n * math.log(n + 1) - math.lgamma(n + 1)
