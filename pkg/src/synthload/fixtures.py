"""Synthetic demo inputs: a small population, sinusoidal weather and donor pools.

    python -m synthload.fixtures OUT_DIR [--households N] [--seed S]

writes every input file plus ``config.json`` and ``lighting_targets.json``
into OUT_DIR.  The data are made up; they exist so the pipeline can be run
and tested end to end without survey extracts.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from synthload import ingest
from synthload.core import HOURS, MINUTES, BuildingRecord, ClimateZone, DiaryRecord, Household, Person


@dataclass(frozen=True)
class Site:
    fips: str
    state: str
    zone: ClimateZone
    t_mean: float  # annual mean outdoor temperature, F
    t_amp: float  # seasonal half-range
    t_swing: float  # diurnal half-range
    ghi_peak: float


SITES = (
    Site("17031", "IL", ClimateZone.Cold, 52.0, 20.0, 8.0, 850.0),
    Site("37183", "NC", ClimateZone.MixedHumid, 62.0, 15.0, 9.0, 900.0),
    Site("04013", "AZ", ClimateZone.HotDry, 72.0, 16.0, 11.0, 1000.0),
)

SIZE_PMF = (0.28, 0.34, 0.15, 0.13, 0.10)
LIGHTING_TARGETS = {1: 450.0, 2: 550.0, 3: 620.0, 4: 680.0, 5: 730.0}


def monthly_dates(year: int = 2019, day: int = 15) -> list[dt.date]:
    return [dt.date(year, m, day) for m in range(1, 13)]


def hourly_temps(site: Site, date: dt.date) -> np.ndarray:
    doy = date.timetuple().tm_yday
    daily = site.t_mean - site.t_amp * math.cos(2 * math.pi * (doy - 15) / 365.0)
    h = np.arange(HOURS)
    return daily - site.t_swing * np.cos(2 * math.pi * (h - 3) / 24.0)


def hourly_ghi(site: Site, date: dt.date) -> np.ndarray:
    doy = date.timetuple().tm_yday
    season = -math.cos(2 * math.pi * (doy + 10) / 365.0)  # -1 at winter solstice
    daylen = 12.0 + 2.5 * season
    peak = site.ghi_peak * (0.65 + 0.35 * season)
    sunrise = 12.5 - daylen / 2
    h = np.arange(HOURS) + 0.5
    return np.round(np.clip(peak * np.sin(math.pi * (h - sunrise) / daylen), 0.0, None) * ((h > sunrise) & (h < sunrise + daylen)), 3)


def make_population(n: int, rng: np.random.Generator) -> list[Household]:
    out = []
    for i in range(n):
        site = SITES[i % len(SITES)]
        size = int(rng.choice(len(SIZE_PMF), p=SIZE_PMF)) + 1
        ages = [int(rng.integers(22, 80))]
        for j in range(1, size):
            ages.append(int(rng.integers(20, 75)) if j == 1 and rng.random() < 0.7 else int(rng.integers(1, 18)))
        members = tuple(Person(f"H{i:05d}-{j}", a, bool(18 <= a < 65 and rng.random() < 0.75)) for j, a in enumerate(ages))
        income = float(round(rng.lognormal(math.log(65000), 0.6), -2))
        out.append(Household(f"H{i:05d}", site.fips, site.state, site.zone, members, income))
    return out


def _diary(did: str, worker: bool, age: int, hsize: int, rng) -> DiaryRecord:
    plan: list[tuple[str, int]] = []
    wake = int(rng.integers(330, 480))
    plan.append(("sleep", wake))
    if rng.random() < 0.5:
        plan.append(("cook", int(rng.integers(10, 30))))
    plan.append(("home", int(rng.integers(15, 60))))
    t = sum(d for _, d in plan)
    if worker:
        back = int(rng.integers(1000, 1110))
        plan.append(("away", max(back - t, 60)))
    else:
        for act, p, lo, hi in (
            ("cleaning", 0.4, 20, 60),
            ("tv", 0.5, 30, 150),
            ("laundry", 0.35, 30, 90),
            ("computer", 0.35, 30, 120),
        ):
            if rng.random() < p:
                plan.append((act, int(rng.integers(lo, hi))))
                plan.append(("home", int(rng.integers(10, 60))))
        if rng.random() < 0.5:
            plan.append(("away", int(rng.integers(60, 180))))
        if rng.random() < 0.5:
            plan.append(("cook", int(rng.integers(15, 40))))
        t = sum(d for _, d in plan)
        plan.append(("home", max(int(rng.integers(1000, 1080)) - t, 10)))
    plan.append(("home", int(rng.integers(10, 40))))
    if rng.random() < 0.8:
        plan.append(("cook", int(rng.integers(30, 75))))
    if rng.random() < 0.7:
        plan.append(("dishes", int(rng.integers(10, 30))))
    for act, p, lo, hi in (("tv", 0.7, 60, 180), ("computer", 0.35, 30, 120), ("laundry", 0.3, 30, 60)):
        if rng.random() < p:
            plan.append((act, int(rng.integers(lo, hi))))
    plan.append(("home", int(rng.integers(20, 60))))
    segs, cursor = [], 0
    for act, dur in plan:
        end = min(cursor + dur, MINUTES)
        if end > cursor:
            segs.append((cursor, end, act))
            cursor = end
    bed = max(cursor, int(rng.integers(1290, 1420)))
    if bed > cursor:
        segs.append((cursor, bed, "home"))
    if bed < MINUTES:
        segs.append((bed, MINUTES, "sleep"))
    return DiaryRecord(did, {"worker": int(worker), "age": age, "hsize": hsize}, tuple(segs))


def make_diaries(n: int, rng: np.random.Generator) -> list[DiaryRecord]:
    out = []
    for i in range(n):
        age = int(rng.integers(5, 85))
        worker = bool(18 <= age < 65 and rng.random() < 0.7)
        hsize = int(rng.choice(len(SIZE_PMF), p=SIZE_PMF)) + 1
        out.append(_diary(f"D{i:04d}", worker, age, hsize, rng))
    return out


def make_buildings(n: int, rng: np.random.Generator) -> list[BuildingRecord]:
    out = []
    for i in range(n):
        hsize = int(rng.choice(len(SIZE_PMF), p=SIZE_PMF)) + 1
        income = float(round(rng.lognormal(math.log(65000), 0.6), -2))
        area = float(round(np.clip(rng.lognormal(math.log(1300 + 120 * hsize), 0.35), 500, 6000)))
        n_bulbs = int(rng.poisson(18 + 3 * hsize)) + 4
        kinds = rng.multinomial(n_bulbs, (0.4, 0.35, 0.25))
        out.append(
            BuildingRecord(
                donor_id=f"B{i:04d}",
                features={"hsize": hsize, "income": income},
                floor_area=area,
                stories=1 if area < 1800 or rng.random() < 0.4 else 2,
                has_dishwasher=bool(rng.random() < 0.7),
                has_laundry=bool(rng.random() < 0.8),
                has_ac=bool(rng.random() < 0.8),
                water_heater_fuel="electric" if rng.random() < 0.8 else "gas",
                bulbs={"Incandescent": int(kinds[0]), "CFL": int(kinds[1]), "LED": int(kinds[2])},
            )
        )
    return out


def write_fixture(
    out_dir,
    n_households: int = 1000,
    dates: list[dt.date] | None = None,
    seed: int = 7,
    n_diaries: int = 600,
    n_buildings: int = 400,
    overrides: dict | None = None,
) -> Path:
    """Write a complete demo input set; returns the config path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dates = dates or monthly_dates()
    rng = np.random.default_rng(seed)
    households = make_population(n_households, rng)
    ingest.write_population(households, out / "population.csv")
    used = {h.county_fips for h in households}
    sites = [s for s in SITES if s.fips in used]
    ingest.write_hourly({(s.fips, d): hourly_temps(s, d) for s in sites for d in dates}, out / "weather.csv")
    ingest.write_hourly({(s.fips, d): hourly_ghi(s, d) for s in sites for d in dates}, out / "irradiance.csv")
    ingest.write_diaries(make_diaries(n_diaries, rng), out / "diaries.csv")
    ingest.write_buildings(make_buildings(n_buildings, rng), out / "buildings.csv")
    doc = {
        "seed": seed,
        "dates": [d.isoformat() for d in dates],
        "paths": {k: str(out / f"{k}.csv") for k in ("population", "weather", "irradiance", "diaries", "buildings")},
        "output_root": str(out / "records"),
        "workers": 1,
    }
    for key, val in (overrides or {}).items():
        doc[key] = val
    path = out / "config.json"
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    (out / "lighting_targets.json").write_text(
        json.dumps({str(k): v for k, v in LIGHTING_TARGETS.items()}, indent=2) + "\n", encoding="utf-8"
    )
    return path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m synthload.fixtures", description=__doc__.splitlines()[0])
    ap.add_argument("out_dir")
    ap.add_argument("--households", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    print(write_fixture(args.out_dir, args.households, seed=args.seed))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
