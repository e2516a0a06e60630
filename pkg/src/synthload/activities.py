"""Appliance and plug-load activities scheduled from member diaries, plus refrigeration."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from synthload import dists
from synthload.core import HOURS, MINUTES, ClimateZone, EndUse

# diary activity code -> scheduled end-use, in planning order
DIARY_TRIGGERS = (
    ("dishes", EndUse.Dwasher),
    ("cook", EndUse.Cook),
    ("laundry", EndUse.Cwasher),
    ("tv", EndUse.Tv),
    ("computer", EndUse.Computer),
    ("cleaning", EndUse.Cleaning),
)
# shared by the household: simultaneous diary entries collapse into one event
SHARED = frozenset({EndUse.Dwasher, EndUse.Cook, EndUse.Cwasher, EndUse.Tv, EndUse.Cleaning})


class Mode(enum.Enum):
    Automatic = "Automatic"
    SemiAutomatic = "SemiAutomatic"
    Manual = "Manual"


@dataclass(frozen=True)
class ApplianceSpec:
    activity: EndUse
    mode: Mode
    max_daily: int | None
    duration_min: Mapping
    power_w: Mapping[str, Mapping]
    needs_hot_water: bool = False
    appliance_pmf: Mapping[str, float] | None = None
    max_daily_hours: float | None = None
    max_sessions: int | None = None

    @classmethod
    def from_config(cls, activity: EndUse, cfg: Mapping) -> "ApplianceSpec":
        return cls(
            activity=activity,
            mode=Mode(cfg["mode"]),
            max_daily=cfg.get("max_daily"),
            duration_min=cfg["duration_min"],
            power_w=cfg["power_w"],
            needs_hot_water=bool(cfg.get("needs_hot_water", False)),
            appliance_pmf=cfg.get("appliance_pmf"),
            max_daily_hours=cfg.get("max_daily_hours"),
            max_sessions=cfg.get("max_sessions"),
        )

    def pick_appliance(self, rng: np.random.Generator) -> str:
        names = list(self.power_w)
        if len(names) == 1:
            return names[0]
        pmf = self.appliance_pmf or {n: 1.0 for n in names}
        p = np.array([pmf.get(n, 0.0) for n in names], dtype=float)
        return names[int(rng.choice(len(names), p=p / p.sum()))]

    def cap(self) -> int | None:
        caps = [c for c in (self.max_daily, self.max_sessions) if c is not None]
        return min(caps) if caps else None


def activity_specs(section: Mapping) -> dict[EndUse, ApplianceSpec]:
    return {EndUse(name): ApplianceSpec.from_config(EndUse(name), cfg) for name, cfg in section.items()}


@dataclass(frozen=True)
class ActivityEvent:
    activity: EndUse
    start_min: int
    duration_min: float
    power_w: float
    scope: str = "household"
    appliance: str = ""

    def __post_init__(self):
        if not 0 <= self.start_min < MINUTES:
            raise ValueError(f"event start {self.start_min} outside the day")
        if not self.duration_min > 0 or not self.power_w > 0:
            raise ValueError(f"{self.activity} event needs positive duration and power")

    @property
    def start_hour(self) -> int:
        return self.start_min // 60

    @property
    def energy_kwh(self) -> float:
        return self.power_w * self.duration_min / 60.0 / 1000.0


@dataclass
class DayPlan:
    events: list[ActivityEvent]
    dropped: Counter = field(default_factory=Counter)


def _first_occupied_minute(occ: np.ndarray, minute: float) -> int | None:
    m = int(np.ceil(minute))
    while m < MINUTES:
        h = m // 60
        if occ[h] >= 1:
            return m
        m = (h + 1) * 60
    return None


def plan_day(household, occupancy, specs: Mapping[EndUse, ApplianceSpec], rng: np.random.Generator) -> DayPlan:
    """Household activity sequence for one day.

    Candidates come from the members' diaries: one per activity segment, with
    a start minute drawn uniformly inside it.  A candidate survives only if
    its start hour is occupied, the appliance is present, and the daily cap
    is not exceeded.  Every washer load is followed by a dryer load starting
    at the first occupied minute after the wash ends.
    """
    occ = np.asarray(occupancy.counts if hasattr(occupancy, "counts") else occupancy)
    dw = household.dwelling
    plan = DayPlan([])
    for code, use in DIARY_TRIGGERS:
        spec = specs[use]
        starts: list[tuple[int, str]] = []
        for member in household.members:
            for a, b in member.diary.activity_segments(code):
                starts.append((a + int(rng.integers(b - a)), member.pid))
        if not starts:
            continue
        if (use is EndUse.Dwasher and not dw.has_dishwasher) or (use is EndUse.Cwasher and not dw.has_laundry):
            plan.dropped[f"{use.value}:no_appliance"] += len(starts)
            continue
        kept = []
        seen_hours = set()
        for start, pid in sorted(starts):
            if occ[start // 60] < 1:
                plan.dropped[f"{use.value}:unoccupied"] += 1
                continue
            if use in SHARED:
                if start // 60 in seen_hours:
                    continue
                seen_hours.add(start // 60)
            kept.append((start, "household" if use in SHARED else pid))
        cap = spec.cap()
        if cap is not None and len(kept) > cap:
            plan.dropped[f"{use.value}:cap"] += len(kept) - cap
            pick = np.sort(rng.choice(len(kept), size=cap, replace=False))
            kept = [kept[i] for i in pick]
        budget = None if spec.max_daily_hours is None else spec.max_daily_hours * 60.0
        for start, scope in kept:
            duration = min(dists.draw_positive(spec.duration_min, rng), MINUTES - start)
            if budget is not None:
                duration = min(duration, budget)
                if duration <= 0:
                    plan.dropped[f"{use.value}:hours_cap"] += 1
                    continue
                budget -= duration
            name = spec.pick_appliance(rng)
            power = dists.draw_positive(spec.power_w[name], rng)
            event = ActivityEvent(use, start, duration, power, scope, name)
            if use is EndUse.Cwasher:
                dryer = _dryer_after(event, occ, specs[EndUse.Cdryer], rng)
                if dryer is None:
                    plan.dropped["cwasher:no_dryer_slot"] += 1
                    continue
                plan.events.extend((event, dryer))
            else:
                plan.events.append(event)
    return plan


def _dryer_after(washer: ActivityEvent, occ: np.ndarray, spec: ApplianceSpec, rng) -> ActivityEvent | None:
    start = _first_occupied_minute(occ, washer.start_min + washer.duration_min)
    if start is None:
        return None
    duration = min(dists.draw_positive(spec.duration_min, rng), MINUTES - start)
    name = spec.pick_appliance(rng)
    return ActivityEvent(EndUse.Cdryer, start, duration, dists.draw_positive(spec.power_w[name], rng), washer.scope, name)


def event_hourly(event: ActivityEvent) -> np.ndarray:
    """Split one event's energy over the hours it spans, pro rata by minutes."""
    start = float(event.start_min)
    end = start + event.duration_min
    lo = np.arange(HOURS) * 60.0
    overlap = np.clip(np.minimum(end, lo + 60.0) - np.maximum(start, lo), 0.0, None)
    return event.energy_kwh * overlap / event.duration_min


def events_to_profiles(events: Iterable[ActivityEvent]) -> dict[EndUse, np.ndarray]:
    out = {use: np.zeros(HOURS) for use in EndUse if use not in (EndUse.Hvac, EndUse.H2o, EndUse.Light, EndUse.Refr)}
    for ev in events:
        out[ev.activity] = out[ev.activity] + event_hourly(ev)
    return out


# --- refrigerator -------------------------------------------------------------


class SingularDesign(ValueError):
    pass


@dataclass(frozen=True)
class RefrigeratorCoeffs:
    beta0: float
    beta_temp: float
    zone_offsets: Mapping[str, float]
    r2: float | None = None
    stderr: Mapping[str, float] | None = None
    n: int | None = None

    @classmethod
    def from_config(cls, cfg: Mapping) -> "RefrigeratorCoeffs":
        return cls(float(cfg["beta0"]), float(cfg["beta_temp"]), {k: float(v) for k, v in cfg.get("zone_offsets", {}).items()})

    def to_dict(self) -> dict:
        d = {"beta0": self.beta0, "beta_temp": self.beta_temp, "zone_offsets": dict(self.zone_offsets)}
        if self.r2 is not None:
            d.update(r2=self.r2, stderr=dict(self.stderr or {}), n=self.n)
        return d


def refrigerator_daily(coeffs: RefrigeratorCoeffs, t_avg_f: float, zone: ClimateZone) -> float:
    """Daily refrigerator kWh from the day's mean outdoor temperature."""
    key = zone.value if isinstance(zone, ClimateZone) else str(zone)
    return max(0.0, coeffs.beta0 + coeffs.beta_temp * t_avg_f + coeffs.zone_offsets.get(key, 0.0))


def refrigerator_profile(daily_kwh: float, noise_frac: float, rng: np.random.Generator) -> np.ndarray:
    if daily_kwh < 0:
        raise ValueError("daily refrigerator energy must be nonnegative")
    base = daily_kwh / HOURS
    hourly = np.clip(base + rng.normal(0.0, noise_frac * base, HOURS), 0.0, None)
    total = hourly.sum()
    if total <= 0:
        return np.full(HOURS, base)
    return hourly * (daily_kwh / total)


def fit_refrigerator(samples: Sequence[tuple[float, float, str | ClimateZone]], baseline: str | None = None) -> RefrigeratorCoeffs:
    """Ordinary least squares on [1, t_avg, zone dummies].

    ``baseline`` (default: the first zone present, in ``ClimateZone`` order)
    gets a zero offset, as does any zone absent from the data.
    """
    y = np.array([s[0] for s in samples], dtype=float)
    t = np.array([s[1] for s in samples], dtype=float)
    zones = [s[2].value if isinstance(s[2], ClimateZone) else ClimateZone.parse(str(s[2])).value for s in samples]
    present = [z.value for z in ClimateZone if z.value in set(zones)]
    if baseline is None:
        baseline = present[0] if present else ClimateZone.Marine.value
    elif baseline not in present:
        raise ValueError(f"baseline zone {baseline!r} does not occur in the data")
    others = [z for z in present if z != baseline]
    X = np.column_stack([np.ones(len(y)), t] + [np.array([z == o for z in zones], dtype=float) for o in others])
    n, p = X.shape
    if n < p + 1 or np.linalg.matrix_rank(X) < p:
        raise SingularDesign(f"design matrix with {n} samples and {p} columns is rank deficient")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    rss = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    sigma2 = rss / (n - p)
    se = np.sqrt(np.diag(sigma2 * np.linalg.inv(X.T @ X)))
    names = ["beta0", "beta_temp"] + [f"offset:{o}" for o in others]
    offsets = {z.value: 0.0 for z in ClimateZone}
    offsets.update({o: float(b) for o, b in zip(others, beta[2:])})
    return RefrigeratorCoeffs(
        beta0=float(beta[0]),
        beta_temp=float(beta[1]),
        zone_offsets=offsets,
        r2=1.0 - rss / tss if tss > 0 else 1.0,
        stderr=dict(zip(names, (float(s) for s in se))),
        n=n,
    )
