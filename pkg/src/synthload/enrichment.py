"""Attach donor diaries and building records to synthetic households.

Donors are partitioned into strata by cross-binning a handful of matching
features; a synthetic entity receives a uniformly random donor from its own
stratum, or from the nearest nonempty one when its stratum is empty.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from synthload import rng as rngmod
from synthload.core import (
    HOURS,
    BuildingRecord,
    BulbKind,
    ClimateZone,
    DiaryRecord,
    Dwelling,
    Household,
    Person,
)


class NonpositiveFloorArea(ValueError):
    pass


class DiaryMissing(ValueError):
    pass


@dataclass(frozen=True)
class FeatureBinning:
    """Either cut points (``edges``) for a numeric feature or an explicit category list."""

    name: str
    edges: tuple[float, ...] | None = None
    categories: tuple | None = None

    def __post_init__(self):
        if (self.edges is None) == (self.categories is None):
            raise ValueError(f"feature {self.name!r}: give exactly one of edges or categories")
        if self.edges is not None and list(self.edges) != sorted(self.edges):
            raise ValueError(f"feature {self.name!r}: edges must be ascending")

    def index(self, value) -> int:
        if self.edges is not None:
            # cut points: bin i holds edges[i-1] <= v < edges[i]
            return int(np.searchsorted(np.asarray(self.edges, dtype=float), float(value), side="right"))
        for i, cat in enumerate(self.categories):
            if value == cat or (isinstance(cat, (int, float)) and _as_float(value) == float(cat)):
                return i
        raise ValueError(f"feature {self.name!r}: value {value!r} not in categories {list(self.categories)}")


def _as_float(v):
    try:
        return float(v)
    except (TypeError, ValueError):
        return None


@dataclass(frozen=True)
class MatchSpec:
    features: tuple[FeatureBinning, ...]

    def __post_init__(self):
        if not self.features:
            raise ValueError("MatchSpec needs at least one feature")

    @classmethod
    def from_config(cls, items: Sequence[Mapping]) -> "MatchSpec":
        feats = []
        for item in items:
            edges = item.get("edges")
            cats = item.get("categories")
            feats.append(
                FeatureBinning(
                    item["feature"],
                    tuple(float(e) for e in edges) if edges is not None else None,
                    tuple(cats) if cats is not None else None,
                )
            )
        return cls(tuple(feats))

    def stratum(self, features: Mapping) -> tuple[int, ...]:
        try:
            return tuple(f.index(features[f.name]) for f in self.features)
        except KeyError as exc:
            raise ValueError(f"entity lacks matching feature {exc.args[0]!r}") from None


class Stratifier:
    """Donor records grouped by stratum, with nearest-stratum fallback."""

    def __init__(self, records: Sequence, spec: MatchSpec):
        if not records:
            raise ValueError("cannot stratify an empty donor pool")
        self.records = tuple(records)
        self.spec = spec
        groups: dict[tuple[int, ...], list[int]] = {}
        for i, rec in enumerate(self.records):
            groups.setdefault(spec.stratum(rec.features), []).append(i)
        self.groups = {k: tuple(v) for k, v in sorted(groups.items())}
        self._keys = np.array(list(self.groups), dtype=int)
        self._fallback: dict[tuple[int, ...], tuple[int, ...]] = {}

    def resolve(self, key: tuple[int, ...]) -> tuple[int, ...]:
        if key in self.groups:
            return key
        hit = self._fallback.get(key)
        if hit is None:
            dist = np.abs(self._keys - np.asarray(key)).sum(axis=1)
            # keys are sorted lexicographically, so argmin picks the lowest tied stratum
            hit = tuple(int(x) for x in self._keys[int(np.argmin(dist))])
            self._fallback[key] = hit
        return hit

    def draw(self, features: Mapping, rng: np.random.Generator):
        members = self.groups[self.resolve(self.spec.stratum(features))]
        return self.records[members[int(rng.integers(len(members)))]]


def person_features(person: Person, household: Household) -> dict:
    return {
        "age": person.age,
        "worker": 1 if person.worker else 0,
        "hsize": household.size,
        "income": household.income,
        "zone": household.zone.value,
    }


def household_features(household: Household) -> dict:
    return {
        "hsize": household.size,
        "income": household.income,
        "zone": household.zone.value,
        "nadults": sum(1 for m in household.members if m.age >= 18),
    }


def match_diary(person, household, pool, spec: MatchSpec, rng, stratifier: Stratifier | None = None) -> DiaryRecord:
    strat = stratifier or Stratifier(pool, spec)
    return strat.draw(person_features(person, household), rng)


def match_building(household, pool, spec: MatchSpec, rng, stratifier: Stratifier | None = None) -> BuildingRecord:
    strat = stratifier or Stratifier(pool, spec)
    return strat.draw(household_features(household), rng)


def wall_area(floor_area: float, stories: int = 1, ceiling_height: float = 8.0) -> float:
    """Exterior wall area of a square-footprint house."""
    return 4.0 * math.sqrt(floor_area / stories) * ceiling_height * stories


def dwelling_params(sections: Mapping, zone: ClimateZone) -> dict:
    enr = sections["enrichment"]
    zp = enr["zones"][zone.value]
    return {
        "r_roof": float(zp["r_roof"]),
        "r_wall": float(zp["r_wall"]),
        "ceiling_height_ft": float(zp.get("ceiling_height_ft", enr["ceiling_height_ft"])),
        "setpoint_heat_f": float(zp.get("setpoint_heat_f", enr["setpoint_heat_f"])),
        "setpoint_cool_f": float(zp.get("setpoint_cool_f", enr["setpoint_cool_f"])),
        "heater_efficiency": float(zp.get("heater_efficiency", enr["heater_efficiency"])),
        "hvac_efficiency": float(zp.get("hvac_efficiency", enr["hvac_efficiency"])),
        "water_heater_efficiency": tuple(enr["water_heater_efficiency"]),
        "bulb_watts": dict(sections["lighting"]["bulb_watts"]),
        "shuffle_bulbs": bool(enr.get("shuffle_bulbs", True)),
    }


def realize_dwelling(household: Household, record: BuildingRecord, params: Mapping, rng=None) -> Dwelling:
    """Turn a donated building record into the dwelling the models consume.

    ``rng`` (optional) draws the water-heater efficiency and the rank order of
    lighting units; without it the efficiency is the midpoint of its range
    and bulbs keep record order.
    """
    if not record.floor_area > 0:
        raise NonpositiveFloorArea(f"building {record.donor_id}: floor area {record.floor_area}")
    stories = max(1, int(record.stories))
    units = []
    for kind in BulbKind:
        watts = float(params["bulb_watts"][kind.value])
        units.extend([(kind, watts)] * int(record.bulbs.get(kind.value, 0)))
    lo, hi = params["water_heater_efficiency"]
    if rng is not None:
        eta_wh = float(rng.uniform(lo, hi))
        if params.get("shuffle_bulbs", True) and units:
            units = [units[i] for i in rng.permutation(len(units))]
    else:
        eta_wh = (lo + hi) / 2
    return Dwelling(
        floor_area=float(record.floor_area),
        wall_area=wall_area(record.floor_area, stories, params["ceiling_height_ft"]),
        stories=stories,
        r_roof=params["r_roof"],
        r_wall=params["r_wall"],
        hvac_efficiency=params["hvac_efficiency"],
        heater_efficiency=params["heater_efficiency"],
        setpoint_heat=params["setpoint_heat_f"],
        setpoint_cool=params["setpoint_cool_f"],
        has_dishwasher=record.has_dishwasher,
        has_laundry=record.has_laundry,
        has_ac=record.has_ac,
        has_electric_water_heater=record.has_electric_water_heater,
        lighting_units=tuple(units),
        water_heater_efficiency=eta_wh,
    )


@dataclass(frozen=True)
class OccupancySchedule:
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != HOURS:
            raise ValueError("occupancy needs 24 hourly counts")
        if any(c < 0 for c in self.counts):
            raise ValueError("occupancy counts must be nonnegative")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.counts, dtype=int)


def member_presence(person: Person) -> np.ndarray:
    """Hours in which the person is home and awake for at least 30 of 60 minutes."""
    if person.diary is None:
        raise DiaryMissing(f"person {person.pid} has no diary")
    minutes = person.diary.awake_home_minutes().reshape(HOURS, 60)
    return minutes.sum(axis=1) >= 30


def derive_occupancy(household: Household) -> OccupancySchedule:
    counts = np.zeros(HOURS, dtype=int)
    for m in household.members:
        counts += member_presence(m)
    return OccupancySchedule(tuple(int(c) for c in counts))


@dataclass
class Enricher:
    """Per-run matching state: one stratifier per donor pool."""

    diaries: Stratifier
    buildings: Stratifier
    sections: Mapping

    @classmethod
    def build(cls, pool, sections: Mapping) -> "Enricher":
        enr = sections["enrichment"]
        return cls(
            Stratifier(pool.diaries, MatchSpec.from_config(enr["diary_match"])),
            Stratifier(pool.buildings, MatchSpec.from_config(enr["building_match"])),
            sections,
        )

    def enrich(self, household: Household, seed: int) -> Household:
        members = tuple(
            dataclasses.replace(
                m,
                diary=match_diary(
                    m, household, None, self.diaries.spec, rngmod.stream(seed, household.hid, None, f"diary:{m.pid}"), self.diaries
                ),
            )
            for m in household.members
        )
        record = match_building(
            household, None, self.buildings.spec, rngmod.stream(seed, household.hid, None, "building"), self.buildings
        )
        dwelling = realize_dwelling(
            household,
            record,
            dwelling_params(self.sections, household.zone),
            rngmod.stream(seed, household.hid, None, "dwelling"),
        )
        return dataclasses.replace(household, members=members, dwelling=dwelling)
