"""Domain types shared by every model, plus the end-use aggregation identities.

Units are fixed package-wide: energy in kWh, temperature in degF, water in
gallons, irradiance in W/m^2, areas in ft^2.  Hours are indexed 0..23.
"""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

HOURS = 24


class ClimateZone(enum.Enum):
    Marine = "Marine"
    HotDry = "HotDry"
    HotHumid = "HotHumid"
    MixedHumid = "MixedHumid"
    Cold = "Cold"

    @classmethod
    def parse(cls, text: str) -> "ClimateZone":
        try:
            return cls(text.strip())
        except ValueError:
            raise ValueError(
                f"unknown climate zone {text!r}; expected one of "
                + ", ".join(z.value for z in cls)
            ) from None

    def __str__(self) -> str:
        return self.value


class EndUse(enum.Enum):
    """The eleven simulated sub-uses.  Declaration order is the summation order."""

    Hvac = "hvac"
    H2o = "h2o"
    Light = "light"
    Refr = "refr"
    Dwasher = "dwasher"
    Cook = "cook"
    Cwasher = "cwasher"
    Cdryer = "cdryer"
    Tv = "tv"
    Computer = "computer"
    Cleaning = "cleaning"

    def __str__(self) -> str:
        return self.value


APPLIANCE_USES = (
    EndUse.Dwasher,
    EndUse.Cook,
    EndUse.Cwasher,
    EndUse.Cdryer,
    EndUse.Tv,
    EndUse.Computer,
    EndUse.Cleaning,
)

#: Eight-way rollup used in the published records, in column order.
PUBLISHED_USES = ("hvac", "h2o", "light", "refr", "dwasher", "cook", "laundry", "misc")

_ROLLUP = {
    "hvac": (EndUse.Hvac,),
    "h2o": (EndUse.H2o,),
    "light": (EndUse.Light,),
    "refr": (EndUse.Refr,),
    "dwasher": (EndUse.Dwasher,),
    "cook": (EndUse.Cook,),
    "laundry": (EndUse.Cwasher, EndUse.Cdryer),
    "misc": (EndUse.Tv, EndUse.Computer, EndUse.Cleaning),
}

#: Composition groups compared against the published national shares.
COMPOSITION_GROUPS = {
    "hvac": ("hvac",),
    "dhw": ("h2o",),
    "lighting": ("light",),
    "refrigerator": ("refr",),
    "appliances": ("dwasher", "cook", "laundry", "misc"),
}


def _hours(values: Iterable[float], name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) != HOURS:
        raise ValueError(f"{name}: expected {HOURS} hourly values, got {len(out)}")
    return out


#: Diary activity codes.  Everything except ``away`` is at home; everything
#: except ``sleep`` and ``away`` is awake at home.
DIARY_ACTIVITIES = ("sleep", "away", "home", "cook", "tv", "computer", "cleaning", "laundry", "dishes")
MINUTES = 24 * 60


@dataclass(frozen=True)
class DiaryRecord:
    """A 24 h time-use diary: contiguous (start_min, end_min, activity) segments."""

    donor_id: str
    features: Mapping[str, object]
    segments: tuple[tuple[int, int, str], ...]

    def __post_init__(self):
        segs = tuple((int(a), int(b), str(c)) for a, b, c in self.segments)
        object.__setattr__(self, "segments", segs)
        cursor = 0
        for start, end, act in segs:
            if start != cursor or end <= start:
                raise ValueError(f"diary {self.donor_id}: segments do not tile the day at minute {start}")
            if act not in DIARY_ACTIVITIES:
                raise ValueError(f"diary {self.donor_id}: unknown activity {act!r}")
            cursor = end
        if cursor != MINUTES:
            raise ValueError(f"diary {self.donor_id}: segments end at minute {cursor}, not {MINUTES}")

    def awake_home_minutes(self) -> np.ndarray:
        mask = np.zeros(MINUTES, dtype=bool)
        for start, end, act in self.segments:
            if act not in ("sleep", "away"):
                mask[start:end] = True
        return mask

    def activity_segments(self, activity: str) -> list[tuple[int, int]]:
        return [(a, b) for a, b, c in self.segments if c == activity]

    def to_dict(self) -> dict:
        return {
            "donor_id": self.donor_id,
            "features": dict(self.features),
            "segments": [list(s) for s in self.segments],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DiaryRecord":
        return cls(str(d["donor_id"]), dict(d["features"]), tuple(tuple(s) for s in d["segments"]))


@dataclass(frozen=True)
class BuildingRecord:
    """Survey-style building attributes donated to a synthetic household."""

    donor_id: str
    features: Mapping[str, object]
    floor_area: float
    stories: int
    has_dishwasher: bool
    has_laundry: bool
    has_ac: bool
    water_heater_fuel: str
    bulbs: Mapping[str, int]

    @property
    def has_electric_water_heater(self) -> bool:
        return self.water_heater_fuel == "electric"

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["features"] = dict(self.features)
        d["bulbs"] = dict(self.bulbs)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "BuildingRecord":
        return cls(**d)


@dataclass(frozen=True)
class Person:
    pid: str
    age: int
    worker: bool
    diary: DiaryRecord | None = None

    def __post_init__(self):
        if self.age < 0:
            raise ValueError(f"person {self.pid}: negative age {self.age}")

    def to_dict(self) -> dict:
        d = {"pid": self.pid, "age": self.age, "worker": self.worker}
        if self.diary is not None:
            d["diary"] = self.diary.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Person":
        diary = None if d.get("diary") is None else DiaryRecord.from_dict(d["diary"])
        return cls(str(d["pid"]), int(d["age"]), bool(d["worker"]), diary)


class BulbKind(enum.Enum):
    Incandescent = "Incandescent"
    CFL = "CFL"
    LED = "LED"


@dataclass(frozen=True)
class Dwelling:
    floor_area: float
    wall_area: float
    stories: int
    r_roof: float
    r_wall: float
    hvac_efficiency: float
    heater_efficiency: float
    setpoint_heat: float
    setpoint_cool: float
    has_dishwasher: bool
    has_laundry: bool
    has_ac: bool
    has_electric_water_heater: bool
    lighting_units: tuple[tuple[BulbKind, float], ...] = ()
    water_heater_efficiency: float = 0.9

    def __post_init__(self):
        if not self.floor_area > 0:
            raise ValueError(f"floor_area must be positive, got {self.floor_area}")
        if not self.wall_area > 0:
            raise ValueError(f"wall_area must be positive, got {self.wall_area}")
        if self.stories < 1:
            raise ValueError(f"stories must be >= 1, got {self.stories}")
        for name in ("hvac_efficiency", "heater_efficiency", "water_heater_efficiency"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if not self.setpoint_heat < self.setpoint_cool:
            raise ValueError(
                f"setpoint_heat {self.setpoint_heat} must be below setpoint_cool {self.setpoint_cool}"
            )
        if not (self.r_roof > 0 and self.r_wall > 0):
            raise ValueError("R-values must be positive")

    @property
    def lighting_watts(self) -> np.ndarray:
        return np.array([w for _, w in self.lighting_units], dtype=float)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "lighting_units"}
        d["lighting_units"] = [[kind.value, watts] for kind, watts in self.lighting_units]
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Dwelling":
        kw = dict(d)
        kw["lighting_units"] = tuple((BulbKind(k), float(w)) for k, w in d["lighting_units"])
        return cls(**kw)


@dataclass(frozen=True)
class Household:
    hid: str
    county_fips: str
    state: str
    zone: ClimateZone
    members: tuple[Person, ...]
    income: float
    dwelling: Dwelling | None = None

    def __post_init__(self):
        if len(self.members) < 1:
            raise ValueError(f"household {self.hid}: no members")
        if len(self.county_fips) != 5 or not self.county_fips.isdigit():
            raise ValueError(f"household {self.hid}: FIPS {self.county_fips!r} is not 5 digits")

    @property
    def size(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {
            "hid": self.hid,
            "county_fips": self.county_fips,
            "state": self.state,
            "zone": self.zone.value,
            "members": [m.to_dict() for m in self.members],
            "income": self.income,
            "dwelling": None if self.dwelling is None else self.dwelling.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Household":
        return cls(
            hid=str(d["hid"]),
            county_fips=str(d["county_fips"]),
            state=str(d["state"]),
            zone=ClimateZone(d["zone"]),
            members=tuple(Person.from_dict(m) for m in d["members"]),
            income=float(d["income"]),
            dwelling=None if d.get("dwelling") is None else Dwelling.from_dict(d["dwelling"]),
        )


@dataclass(frozen=True)
class EndUseProfile:
    enduse: EndUse
    kwh: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kwh", _hours(self.kwh, f"{self.enduse} profile"))
        if any(not v >= 0 for v in self.kwh):
            raise ValueError(f"{self.enduse} profile has negative or NaN energy: {self.kwh}")

    @classmethod
    def zeros(cls, enduse: EndUse) -> "EndUseProfile":
        return cls(enduse, (0.0,) * HOURS)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.kwh)

    @property
    def daily(self) -> float:
        return float(sum(self.kwh))

    def to_dict(self) -> dict:
        return {"enduse": self.enduse.value, "kwh": list(self.kwh)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "EndUseProfile":
        return cls(EndUse(d["enduse"]), tuple(d["kwh"]))


@dataclass(frozen=True)
class HouseholdDayResult:
    hid: str
    date: dt.date
    profiles: Mapping[EndUse, EndUseProfile]
    gallons_hot_water: tuple[float, ...] = (0.0,) * HOURS
    dropped_events: int = 0

    def __post_init__(self):
        missing = [u for u in EndUse if u not in self.profiles]
        if missing:
            raise ValueError(f"{self.hid} {self.date}: missing end-use profiles {missing}")
        object.__setattr__(self, "gallons_hot_water", _hours(self.gallons_hot_water, "gallons"))
        if any(not g >= 0 for g in self.gallons_hot_water):
            raise ValueError(f"{self.hid} {self.date}: negative hot-water gallons")

    def to_dict(self) -> dict:
        return {
            "hid": self.hid,
            "date": self.date.isoformat(),
            "profiles": [self.profiles[u].to_dict() for u in EndUse],
            "gallons_hot_water": list(self.gallons_hot_water),
            "dropped_events": self.dropped_events,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "HouseholdDayResult":
        profiles = {}
        for p in d["profiles"]:
            prof = EndUseProfile.from_dict(p)
            profiles[prof.enduse] = prof
        return cls(
            hid=str(d["hid"]),
            date=dt.date.fromisoformat(d["date"]),
            profiles=profiles,
            gallons_hot_water=tuple(d["gallons_hot_water"]),
            dropped_events=int(d.get("dropped_events", 0)),
        )


def aggregate_total(result: HouseholdDayResult) -> np.ndarray:
    """Hourly household total: TCL (hvac + h2o) plus all appliance sub-uses.

    Summed strictly in ``EndUse`` declaration order so the result is
    reproducible bit for bit.
    """
    total = np.zeros(HOURS)
    for use in EndUse:
        total = total + result.profiles[use].array
    return total


def rollup_published(result: HouseholdDayResult) -> dict[str, np.ndarray]:
    """Collapse the eleven sub-uses into the eight published end-uses."""
    out = {}
    for name, parts in _ROLLUP.items():
        acc = np.zeros(HOURS)
        for use in parts:
            acc = acc + result.profiles[use].array
        out[name] = acc
    return out


def composition_shares(totals: Mapping[str, float]) -> dict[str, float]:
    """Shares of the composition groups given daily/annual totals per published use."""
    grand = sum(totals[u] for u in PUBLISHED_USES)
    if grand <= 0:
        return {g: 0.0 for g in COMPOSITION_GROUPS}
    return {g: sum(totals[u] for u in uses) / grand for g, uses in COMPOSITION_GROUPS.items()}


def profiles_from_arrays(arrays: Mapping[EndUse, np.ndarray]) -> dict[EndUse, EndUseProfile]:
    out = {}
    for use in EndUse:
        arr = arrays.get(use)
        out[use] = EndUseProfile.zeros(use) if arr is None else EndUseProfile(use, arr.tolist())
    return out
