"""End-to-end generation: enrichment, the six end-use models, aggregation, records.

Work is split by household; every stochastic draw comes from a stream keyed
by (seed, household, date, model), so output does not depend on how many
worker processes run or in which order they finish.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import math
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from synthload import activities, ingest, lighting, thermal
from synthload import rng as rngmod
from synthload.config import RunConfig
from synthload.core import (
    HOURS,
    PUBLISHED_USES,
    EndUse,
    Household,
    HouseholdDayResult,
    aggregate_total,
    composition_shares,
    profiles_from_arrays,
    rollup_published,
)
from synthload.enrichment import Enricher, derive_occupancy, member_presence

log = logging.getLogger(__name__)

META_COLUMNS = ("hid", "size", "income", "floor_area", "zone")
RECORD_COLUMNS = META_COLUMNS + tuple(f"{use}_h{t}" for use in PUBLISHED_USES for t in range(1, HOURS + 1))


class SimulationError(RuntimeError):
    def __init__(self, hid: str, date: dt.date | None, cause: BaseException):
        self.hid, self.date = hid, date
        when = "" if date is None else f" on {date.isoformat()}"
        super().__init__(f"household {hid}{when}: {type(cause).__name__}: {cause}")


@dataclass
class Inputs:
    households: list[Household]
    weather: dict
    irradiance: dict
    pool: ingest.DonorPool
    inlet: ingest.InletTempTable


def load_inputs(config: RunConfig) -> Inputs:
    households = ingest.load_population(config.population)
    weather = ingest.load_weather(config.weather, config.sections["ingest"]["temp_band_f"])
    irradiance = ingest.load_irradiance(config.irradiance)
    ingest.check_coverage(households, config.dates, weather, irradiance)
    pool = ingest.load_donor_pool(config.diaries, config.buildings)
    inlet = ingest.load_inlet_temps(config.inlet_temps)
    return Inputs(households, weather, irradiance, pool, inlet)


@dataclass
class Models:
    """Per-run model state shared read-only by all households."""

    seed: int
    sections: Mapping
    enricher: Enricher
    specs: Mapping
    fridge: activities.RefrigeratorCoeffs
    inlet: ingest.InletTempTable

    @classmethod
    def build(cls, seed: int, sections: Mapping, pool, inlet) -> "Models":
        return cls(
            seed=int(seed),
            sections=sections,
            enricher=Enricher.build(pool, sections),
            specs=activities.activity_specs(sections["activities"]),
            fridge=activities.RefrigeratorCoeffs.from_config(sections["refrigerator"]),
            inlet=inlet,
        )


def simulate_day(hh: Household, date: dt.date, temps, ghi, models: Models, presence=None, occupancy=None) -> HouseholdDayResult:
    """All end-use models for one enriched household on one day."""
    sec = models.sections
    if presence is None:
        presence = [member_presence(m) for m in hh.members]
    if occupancy is None:
        occupancy = derive_occupancy(hh)
    dw = hh.dwelling

    def stream(tag):
        return rngmod.stream(models.seed, hh.hid, date, tag)

    plan = activities.plan_day(hh, occupancy, models.specs, stream("activities"))
    arrays = activities.events_to_profiles(plan.events)

    t_cold = models.inlet.lookup(date.month, hh.zone)
    dhw = thermal.schedule_dhw_day(hh, presence, plan.events, t_cold, sec["thermal"], stream("dhw"))
    arrays[EndUse.H2o] = dhw.kwh
    arrays[EndUse.Hvac] = thermal.hvac_day(dw, temps, sec["thermal"]["btu_per_kwh"])
    arrays[EndUse.Light] = lighting.simulate_day(dw.lighting_watts, ghi, occupancy.counts, sec["lighting"], stream("lighting"))
    daily = activities.refrigerator_daily(models.fridge, float(np.mean(temps)), hh.zone)
    arrays[EndUse.Refr] = activities.refrigerator_profile(daily, sec["refrigerator"]["noise_frac"], stream("refrigerator"))
    return HouseholdDayResult(
        hid=hh.hid,
        date=date,
        profiles=profiles_from_arrays(arrays),
        gallons_hot_water=tuple(dhw.gallons.tolist()),
        dropped_events=sum(plan.dropped.values()) + dhw.dropped,
    )


@dataclass
class HouseholdOutput:
    household: Household
    results: list[HouseholdDayResult]
    dropped: Counter = field(default_factory=Counter)


def simulate_household(hh: Household, dates: Sequence[dt.date], weather, irradiance, models: Models) -> HouseholdOutput:
    try:
        enriched = models.enricher.enrich(hh, models.seed)
        presence = [member_presence(m) for m in enriched.members]
        occupancy = derive_occupancy(enriched)
    except Exception as exc:
        raise SimulationError(hh.hid, None, exc) from exc
    out = HouseholdOutput(enriched, [])
    for day in dates:
        key = (hh.county_fips, day)
        try:
            res = simulate_day(enriched, day, weather[key].temp_f, irradiance[key].ghi, models, presence, occupancy)
        except Exception as exc:
            raise SimulationError(hh.hid, day, exc) from exc
        out.results.append(res)
        out.dropped["events"] += res.dropped_events
    return out


# --- worker pool --------------------------------------------------------------

_WORKER: dict = {}


def _init_worker(seed, sections, pool, inlet, weather, irradiance, dates):
    _WORKER["models"] = Models.build(seed, sections, pool, inlet)
    _WORKER["weather"] = weather
    _WORKER["irradiance"] = irradiance
    _WORKER["dates"] = dates


def _work(chunk: Sequence[Household]) -> list[HouseholdOutput]:
    w = _WORKER
    return [simulate_household(h, w["dates"], w["weather"], w["irradiance"], w["models"]) for h in chunk]


def simulate_all(
    households: Sequence[Household],
    dates: Sequence[dt.date],
    weather,
    irradiance,
    pool,
    inlet,
    seed: int,
    sections: Mapping,
    workers: int = 1,
) -> list[HouseholdOutput]:
    if workers <= 1:
        models = Models.build(seed, sections, pool, inlet)
        return [simulate_household(h, dates, weather, irradiance, models) for h in households]
    n_chunks = max(workers * 4, 1)
    size = max(1, math.ceil(len(households) / n_chunks))
    chunks = [households[i : i + size] for i in range(0, len(households), size)]
    locations = {h.county_fips for h in households}
    wx = {k: v for k, v in weather.items() if k[0] in locations and k[1] in set(dates)}
    irr = {k: v for k, v in irradiance.items() if k[0] in locations and k[1] in set(dates)}
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(seed, sections, pool, inlet, wx, irr, list(dates))
    ) as ex:
        parts = list(ex.map(_work, chunks))
    return [o for part in parts for o in part]


# --- records ------------------------------------------------------------------


def record_path(root, date: dt.date, state: str, fips: str) -> Path:
    day = date.isoformat()
    return Path(root) / day / state / f"energy_use_{fips}_{day}.csv"


def _fmt_meta(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_records(outputs: Iterable[HouseholdOutput], root) -> list[str]:
    """Write one CSV per (date, state, county); returns the sorted relative paths."""
    groups: dict[tuple, list] = defaultdict(list)
    for out in outputs:
        hh = out.household
        for res in out.results:
            groups[(res.date, hh.state, hh.county_fips)].append((hh, res))
    manifest = []
    for (day, state, fips), rows in sorted(groups.items()):
        path = record_path(root, day, state, fips)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(RECORD_COLUMNS)
                for hh, res in sorted(rows, key=lambda r: r[0].hid):
                    pub = rollup_published(res)
                    row = [hh.hid, str(hh.size), _fmt_meta(hh.income), _fmt_meta(hh.dwelling.floor_area), hh.zone.value]
                    for use in PUBLISHED_USES:
                        row.extend(f"{v:.6f}" for v in pub[use])
                    w.writerow(row)
        except OSError as exc:
            raise OSError(f"cannot write record file {path}: {exc}") from exc
        manifest.append(path.relative_to(root).as_posix())
    return manifest


@dataclass(frozen=True)
class RecordRow:
    hid: str
    date: dt.date
    state: str
    fips: str
    size: int
    income: float
    floor_area: float
    zone: str
    profiles: Mapping[str, np.ndarray]

    @property
    def total(self) -> np.ndarray:
        acc = np.zeros(HOURS)
        for use in PUBLISHED_USES:
            acc = acc + self.profiles[use]
        return acc


def iter_record_files(root) -> list[Path]:
    return sorted(Path(root).glob("*/*/energy_use_*_*.csv"))


def read_record_file(path) -> Iterator[RecordRow]:
    path = Path(path)
    stem = path.stem  # energy_use_<fips>_<date>
    _, _, fips, day = stem.split("_", 3)
    state = path.parent.name
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RECORD_COLUMNS:
            raise ingest.MissingColumn(path, None, "not a record file (unexpected header)")
        for row in reader:
            vals = np.array(row[len(META_COLUMNS) :], dtype=float).reshape(len(PUBLISHED_USES), HOURS)
            yield RecordRow(
                hid=row[0],
                date=dt.date.fromisoformat(day),
                state=state,
                fips=fips,
                size=int(row[1]),
                income=float(row[2]),
                floor_area=float(row[3]),
                zone=row[4],
                profiles={use: vals[i] for i, use in enumerate(PUBLISHED_USES)},
            )


def read_records(root) -> Iterator[RecordRow]:
    for path in iter_record_files(root):
        yield from read_record_file(path)


def totals_by_use(profile_maps: Iterable[Mapping[str, np.ndarray]]) -> dict[str, float]:
    totals = {u: 0.0 for u in PUBLISHED_USES}
    for prof in profile_maps:
        for u in PUBLISHED_USES:
            totals[u] += float(np.sum(prof[u]))
    return totals


def share_table(totals: Mapping[str, float]) -> dict:
    grand = sum(totals.values())
    return {
        "by_use": {u: (totals[u] / grand if grand > 0 else 0.0) for u in PUBLISHED_USES},
        "composition": composition_shares(totals),
    }


def summarize_records(root) -> dict:
    n = 0
    totals = {u: 0.0 for u in PUBLISHED_USES}
    for rec in read_records(root):
        n += 1
        for u in PUBLISHED_USES:
            totals[u] += float(np.sum(rec.profiles[u]))
    return {"n_records": n, "totals_kwh": totals, **share_table(totals)}


def summarize(outputs: Sequence[HouseholdOutput]) -> dict:
    totals = totals_by_use(rollup_published(r) for o in outputs for r in o.results)
    n = sum(len(o.results) for o in outputs)
    dropped = Counter()
    for o in outputs:
        dropped.update(o.dropped)
    check = 0.0
    for o in outputs:
        for r in o.results:
            check += float(aggregate_total(r).sum())
    return {
        "n_households": len(outputs),
        "n_records": n,
        "totals_kwh": totals,
        "mean_daily_kwh": {u: (totals[u] / n if n else 0.0) for u in PUBLISHED_USES},
        "mean_daily_total_kwh": check / n if n else 0.0,
        "dropped_events": int(dropped["events"]),
        **share_table(totals),
    }


def run(config: RunConfig, write: bool = True) -> dict:
    """Generate records for every (household, date) in the config.

    Returns a summary with record counts, per-use means, composition shares,
    dropped-event tallies and the file manifest.
    """
    inputs = load_inputs(config)
    log.info("simulating %d households x %d days on %d worker(s)", len(inputs.households), len(config.dates), config.worker_count)
    outputs = simulate_all(
        inputs.households,
        config.dates,
        inputs.weather,
        inputs.irradiance,
        inputs.pool,
        inputs.inlet,
        config.seed,
        config.sections,
        config.worker_count,
    )
    summary = summarize(outputs)
    summary["n_days"] = len(config.dates)
    if write:
        root = Path(config.output_root)
        summary["manifest"] = write_records(outputs, root)
        (root / "manifest.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return summary


# --- lighting calibration -----------------------------------------------------


def _calibration_sample(households: Sequence[Household], n: int) -> list[Household]:
    """Evenly spaced subset of households in hid order (all of them when n is 0 or large)."""
    hhs = sorted(households, key=lambda h: h.hid)
    if n and len(hhs) > n:
        step = len(hhs) / n
        hhs = [hhs[int(i * step)] for i in range(n)]
    return hhs


def _target_for(size: int, targets: Mapping[int, float]) -> float:
    keys = sorted(targets)
    below = [k for k in keys if k <= size]
    return targets[below[-1] if below else keys[0]]


@dataclass
class GammaCalibration:
    gamma: float
    ratio: float
    iterations: int
    history: list = field(default_factory=list)


def calibrate_gamma(config: RunConfig, targets: Mapping[int, float], inputs: Inputs | None = None) -> GammaCalibration:
    """Bisect the switch-on constant until simulated annual lighting matches ``targets``.

    ``targets`` maps household size to annual kWh (sizes above the largest
    key use the largest key).  The objective is the mean over sampled
    households of simulated/target annual lighting, driven to 1.
    """
    inputs = inputs or load_inputs(config)
    cal = config.sections["calibration"]
    targets = {int(k): float(v) for k, v in targets.items()}
    hhs = _calibration_sample(inputs.households, int(cal["sample_households"]))
    models = Models.build(config.seed, config.sections, inputs.pool, inputs.inlet)
    cases = []
    for hh in hhs:
        enriched = models.enricher.enrich(hh, models.seed)
        occ = derive_occupancy(enriched).counts
        for day in config.dates:
            ghi = inputs.irradiance[(hh.county_fips, day)].ghi
            cases.append((enriched, day, occ, ghi, _target_for(hh.size, targets)))
    params = config.sections["lighting"]
    per_house_days = len(config.dates)

    def ratio(gamma: float) -> float:
        acc = 0.0
        for hh, day, occ, ghi, target in cases:
            g = rngmod.stream(models.seed, hh.hid, day, "lighting")
            daily = lighting.simulate_day(hh.dwelling.lighting_watts, ghi, occ, params, g, gamma).sum()
            acc += daily * 365.0 / per_house_days / target
        return acc / (len(cases) / per_house_days)

    lo, hi = (float(x) for x in cal["gamma_bounds"])
    history = []
    r_lo, r_hi = ratio(lo), ratio(hi)
    history += [(lo, r_lo), (hi, r_hi)]
    if not r_lo <= 1.0 <= r_hi:
        raise ValueError(f"lighting target not bracketed: ratio {r_lo:.3g} at gamma={lo}, {r_hi:.3g} at gamma={hi}")
    it = 0
    mid, r_mid = hi, r_hi
    while it < int(cal["max_iter"]) and hi / lo - 1.0 > float(cal["rel_tol"]):
        it += 1
        mid = math.sqrt(lo * hi)
        r_mid = ratio(mid)
        history.append((mid, r_mid))
        if abs(r_mid - 1.0) < float(cal["rel_tol"]):
            break
        if r_mid < 1.0:
            lo = mid
        else:
            hi = mid
    return GammaCalibration(gamma=mid, ratio=r_mid, iterations=it, history=history)


# --- bathing calibration ------------------------------------------------------


@dataclass
class BathingCalibration:
    p_bathe: float
    dhw_share: float
    iterations: int
    history: list = field(default_factory=list)


def calibrate_bathing(config: RunConfig, target_share: float, inputs: Inputs | None = None) -> BathingCalibration:
    """Bisect the daily bathing probability until hot water reaches ``target_share`` of total use.

    Every other end use is simulated once on the calibration sample with the
    configured parameters; only the hot-water schedule is re-drawn per trial.
    """
    if not 0 < target_share < 1:
        raise ValueError(f"target share must lie in (0, 1), got {target_share}")
    inputs = inputs or load_inputs(config)
    cal = config.sections["calibration"]
    hhs = _calibration_sample(inputs.households, int(cal["sample_households"]))
    models = Models.build(config.seed, config.sections, inputs.pool, inputs.inlet)
    rest = 0.0
    cases = []
    for hh in hhs:
        out = simulate_household(hh, config.dates, inputs.weather, inputs.irradiance, models)
        enriched = out.household
        presence = [member_presence(m) for m in enriched.members]
        occ = derive_occupancy(enriched)
        for res in out.results:
            rest += float(aggregate_total(res).sum()) - res.profiles[EndUse.H2o].daily
            events = activities.plan_day(enriched, occ, models.specs, rngmod.stream(models.seed, hh.hid, res.date, "activities")).events
            cases.append((enriched, res.date, presence, events, models.inlet.lookup(res.date.month, enriched.zone)))
    params = dict(config.sections["thermal"])

    def share(p: float) -> float:
        params["p_bathe"] = p
        dhw = 0.0
        for hh, day, presence, events, t_cold in cases:
            g = rngmod.stream(models.seed, hh.hid, day, "dhw")
            dhw += float(thermal.schedule_dhw_day(hh, presence, events, t_cold, params, g).kwh.sum())
        total = dhw + rest
        return dhw / total if total > 0 else 0.0

    lo, hi = 0.0, 1.0
    s_lo, s_hi = share(lo), share(hi)
    history = [(lo, s_lo), (hi, s_hi)]
    if not s_lo <= target_share <= s_hi:
        raise ValueError(f"hot-water share {target_share:.3f} unreachable: {s_lo:.3f} at p=0, {s_hi:.3f} at p=1")
    it, mid, s_mid = 0, hi, s_hi
    while it < int(cal["max_iter"]) and hi - lo > 1e-4:
        it += 1
        mid = 0.5 * (lo + hi)
        s_mid = share(mid)
        history.append((mid, s_mid))
        if abs(s_mid - target_share) < float(cal["rel_tol"]) * target_share:
            break
        if s_mid < target_share:
            lo = mid
        else:
            hi = mid
    return BathingCalibration(p_bathe=mid, dhw_share=s_mid, iterations=it, history=history)
