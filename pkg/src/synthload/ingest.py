"""Readers and writers for the external CSV inputs.

All files are UTF-8, comma separated, with a header row.  Every error names
the file and the 1-based data row that caused it.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from synthload.core import (
    HOURS,
    BuildingRecord,
    ClimateZone,
    DiaryRecord,
    Household,
    Person,
)

HOUR_COLUMNS = tuple(f"h{t}" for t in range(HOURS))
POPULATION_COLUMNS = ("hid", "county_fips", "state", "zone", "size", "income", "ages")
BUILDING_COLUMNS = (
    "building_id",
    "floor_area",
    "stories",
    "has_dishwasher",
    "has_laundry",
    "has_ac",
    "water_heater_fuel",
    "n_incandescent",
    "n_cfl",
    "n_led",
)
BULB_COLUMNS = {"Incandescent": "n_incandescent", "CFL": "n_cfl", "LED": "n_led"}


class IngestError(ValueError):
    def __init__(self, path, row: int | None, message: str):
        self.path = str(path)
        self.row = row
        where = f"{path}" if row is None else f"{path}, row {row}"
        super().__init__(f"{where}: {message}")


class MissingColumn(IngestError):
    pass


class BadFips(IngestError):
    pass


class EmptyHousehold(IngestError):
    pass


class DuplicateKey(IngestError):
    pass


class Not24Hours(IngestError):
    pass


class OutOfBand(IngestError):
    pass


class IncompleteTable(IngestError):
    pass


class BadValue(IngestError):
    pass


class MissingInputs(ValueError):
    """Some (location, date) pairs needed by the run have no weather or irradiance."""

    def __init__(self, misses: Sequence[tuple[str, str, dt.date]]):
        self.misses = list(misses)
        listing = ", ".join(f"{kind}:{loc}@{d.isoformat()}" for kind, loc, d in self.misses[:50])
        more = "" if len(self.misses) <= 50 else f" (+{len(self.misses) - 50} more)"
        super().__init__(f"{len(self.misses)} missing exogenous series: {listing}{more}")


@dataclass(frozen=True)
class WeatherDay:
    location_key: str
    date: dt.date
    temp_f: tuple[float, ...]


@dataclass(frozen=True)
class IrradianceDay:
    location_key: str
    date: dt.date
    ghi: tuple[float, ...]


@dataclass(frozen=True)
class InletTempTable:
    cells: Mapping[tuple[int, ClimateZone], float]

    def lookup(self, month: int, zone: ClimateZone) -> float:
        return self.cells[(month, zone)]


@dataclass(frozen=True)
class DonorPool:
    diaries: tuple[DiaryRecord, ...]
    buildings: tuple[BuildingRecord, ...]

    def __post_init__(self):
        if not self.diaries:
            raise ValueError("donor pool has no diaries")
        if not self.buildings:
            raise ValueError("donor pool has no building records")


def _reader(path, required: Iterable[str]):
    fh = open(path, newline="", encoding="utf-8")
    reader = csv.DictReader(fh)
    header = reader.fieldnames or []
    missing = [c for c in required if c not in header]
    if missing:
        fh.close()
        raise MissingColumn(path, None, f"missing column(s) {missing}")
    return fh, reader


def _number(path, row, name, text, kind=float):
    try:
        return kind(text)
    except (TypeError, ValueError):
        raise BadValue(path, row, f"column {name!r}: cannot parse {text!r}") from None


def _flag(path, row, name, text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "y"):
        return True
    if t in ("0", "false", "no", "n", ""):
        return False
    raise BadValue(path, row, f"column {name!r}: not a flag: {text!r}")


def _feature(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


# --- population ---------------------------------------------------------------


def load_population(path) -> list[Household]:
    """Parse a population file into pre-enrichment households.

    Columns: ``hid,county_fips,state,zone,size,income,ages`` with ``ages``
    ``|``-separated.  An optional ``workers`` column (``|``-separated 0/1)
    sets employment; without it, ages 18-64 count as workers.
    """
    out = []
    fh, reader = _reader(path, POPULATION_COLUMNS)
    with fh:
        has_workers = "workers" in (reader.fieldnames or [])
        for row_no, row in enumerate(reader, start=1):
            hid = row["hid"].strip()
            fips = row["county_fips"].strip()
            if len(fips) != 5 or not fips.isdigit():
                raise BadFips(path, row_no, f"household {hid}: FIPS {fips!r} is not 5 digits")
            size = _number(path, row_no, "size", row["size"], int)
            if size <= 0:
                raise EmptyHousehold(path, row_no, f"household {hid} has size {size}")
            ages = [a for a in row["ages"].split("|") if a.strip()]
            if len(ages) != size:
                raise BadValue(path, row_no, f"household {hid}: size {size} but {len(ages)} ages")
            ages = [_number(path, row_no, "ages", a, int) for a in ages]
            if has_workers and row["workers"].strip():
                flags = [_flag(path, row_no, "workers", w) for w in row["workers"].split("|")]
                if len(flags) != size:
                    raise BadValue(path, row_no, f"household {hid}: {len(flags)} worker flags for size {size}")
            else:
                flags = [18 <= a < 65 for a in ages]
            try:
                zone = ClimateZone.parse(row["zone"])
            except ValueError as exc:
                raise BadValue(path, row_no, str(exc)) from None
            members = tuple(Person(f"{hid}-{j}", a, w) for j, (a, w) in enumerate(zip(ages, flags)))
            out.append(
                Household(
                    hid=hid,
                    county_fips=fips,
                    state=row["state"].strip(),
                    zone=zone,
                    members=members,
                    income=_number(path, row_no, "income", row["income"]),
                )
            )
    return out


def write_population(households: Sequence[Household], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POPULATION_COLUMNS + ("workers",))
        for h in households:
            w.writerow(
                [
                    h.hid,
                    h.county_fips,
                    h.state,
                    h.zone.value,
                    h.size,
                    _fmt(h.income),
                    "|".join(str(m.age) for m in h.members),
                    "|".join("1" if m.worker else "0" for m in h.members),
                ]
            )


# --- weather / irradiance -----------------------------------------------------


def _load_hourly(path, lo: float | None, hi: float | None) -> dict:
    out = {}
    fh = open(path, newline="", encoding="utf-8")
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn(path, None, "empty file") from None
        header = [h.strip() for h in header]
        for col in ("location", "date"):
            if col not in header:
                raise MissingColumn(path, None, f"missing column {col!r}")
        hour_cols = [c for c in header if c not in ("location", "date")]
        if tuple(hour_cols) != HOUR_COLUMNS:
            raise Not24Hours(path, None, f"expected hour columns h0..h23, found {len(hour_cols)}: {hour_cols[:3]}...")
        i_loc, i_date = header.index("location"), header.index("date")
        idx = [header.index(c) for c in HOUR_COLUMNS]
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise Not24Hours(path, row_no, f"expected {len(header)} fields, got {len(row)}")
            loc = row[i_loc].strip()
            try:
                day = dt.date.fromisoformat(row[i_date].strip())
            except ValueError:
                raise BadValue(path, row_no, f"bad date {row[i_date]!r}") from None
            vals = tuple(_number(path, row_no, HOUR_COLUMNS[k], row[i], float) for k, i in enumerate(idx))
            for v in vals:
                if (lo is not None and v < lo) or (hi is not None and v > hi) or v != v:
                    raise OutOfBand(path, row_no, f"value {v} outside [{lo}, {hi}]")
            key = (loc, day)
            if key in out:
                raise DuplicateKey(path, row_no, f"duplicate series for {loc} on {day}")
            out[key] = vals
    return out


def load_weather(path, band: Sequence[float] = (-60.0, 135.0)) -> dict[tuple[str, dt.date], WeatherDay]:
    raw = _load_hourly(path, band[0], band[1])
    return {k: WeatherDay(k[0], k[1], v) for k, v in raw.items()}


def load_irradiance(path) -> dict[tuple[str, dt.date], IrradianceDay]:
    raw = _load_hourly(path, 0.0, None)
    return {k: IrradianceDay(k[0], k[1], v) for k, v in raw.items()}


def write_hourly(series: Mapping, path) -> None:
    """Write a weather or irradiance map in the loader's format."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("location", "date") + HOUR_COLUMNS)
        for (loc, day), item in sorted(series.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            vals = getattr(item, "temp_f", None) or getattr(item, "ghi", None) or item
            w.writerow([loc, day.isoformat()] + [_fmt(float(v)) for v in vals])


def check_coverage(households: Iterable[Household], dates: Iterable[dt.date], weather: Mapping, irradiance: Mapping) -> None:
    """Fail fast, listing every (location, date) that lacks weather or irradiance."""
    locations = sorted({h.county_fips for h in households})
    misses = []
    for day in dates:
        for loc in locations:
            if (loc, day) not in weather:
                misses.append(("weather", loc, day))
            if (loc, day) not in irradiance:
                misses.append(("irradiance", loc, day))
    if misses:
        raise MissingInputs(misses)


# --- inlet water temperature --------------------------------------------------


def load_inlet_temps(path=None) -> InletTempTable:
    """Load ``month,zone,t_cold_f``; ``path=None`` loads the bundled default table."""
    if path is None:
        text = resources.files("synthload").joinpath("data/inlet_temps.csv").read_text(encoding="utf-8")
        src, fh = "inlet_temps.csv (bundled)", io.StringIO(text)
    else:
        src, fh = path, open(path, newline="", encoding="utf-8")
    cells = {}
    with fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("month", "zone", "t_cold_f") if c not in (reader.fieldnames or [])]
        if missing:
            raise MissingColumn(src, None, f"missing column(s) {missing}")
        for row_no, row in enumerate(reader, start=1):
            month = _number(src, row_no, "month", row["month"], int)
            try:
                zone = ClimateZone.parse(row["zone"])
            except ValueError as exc:
                raise BadValue(src, row_no, str(exc)) from None
            t = _number(src, row_no, "t_cold_f", row["t_cold_f"])
            if not 1 <= month <= 12:
                raise BadValue(src, row_no, f"month {month} out of range")
            if not 33 <= t <= 90:
                raise OutOfBand(src, row_no, f"inlet temperature {t} outside [33, 90]")
            if (month, zone) in cells:
                raise DuplicateKey(src, row_no, f"duplicate cell ({month}, {zone})")
            cells[(month, zone)] = t
    absent = [(m, z.value) for m in range(1, 13) for z in ClimateZone if (m, z) not in cells]
    if absent:
        raise IncompleteTable(src, None, f"missing {len(absent)} of 60 cells, e.g. {absent[:3]}")
    return InletTempTable(cells)


def lookup_inlet_temp(table: InletTempTable, month: int, zone: ClimateZone) -> float:
    return table.cells[(month, zone)]


def write_inlet_temps(table: InletTempTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("month", "zone", "t_cold_f"))
        for m in range(1, 13):
            for z in ClimateZone:
                w.writerow([m, z.value, _fmt(table.cells[(m, z)])])


# --- donor pools --------------------------------------------------------------


def parse_segments(text: str) -> tuple[tuple[int, int, str], ...]:
    segs = []
    for part in text.split(";"):
        span, act = part.split(":")
        start, end = span.split("-")
        segs.append((int(start), int(end), act.strip()))
    return tuple(segs)


def format_segments(segments) -> str:
    return ";".join(f"{a}-{b}:{c}" for a, b, c in segments)


def load_diaries(path) -> list[DiaryRecord]:
    """Columns ``donor_id,segments`` plus any number of numeric/categorical feature columns."""
    out = []
    seen = set()
    fh, reader = _reader(path, ("donor_id", "segments"))
    with fh:
        feature_cols = [c for c in reader.fieldnames if c not in ("donor_id", "segments")]
        for row_no, row in enumerate(reader, start=1):
            did = row["donor_id"].strip()
            if did in seen:
                raise DuplicateKey(path, row_no, f"duplicate donor_id {did}")
            seen.add(did)
            feats = {}
            for c in feature_cols:
                if row[c] is None or row[c].strip() == "":
                    raise BadValue(path, row_no, f"diary {did}: feature {c!r} is empty")
                feats[c] = _feature(row[c].strip())
            try:
                out.append(DiaryRecord(did, feats, parse_segments(row["segments"])))
            except ValueError as exc:
                raise BadValue(path, row_no, str(exc)) from None
    if not out:
        raise BadValue(path, None, "no diary records")
    return out


def write_diaries(diaries: Sequence[DiaryRecord], path) -> None:
    feature_cols = sorted({k for d in diaries for k in d.features})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["donor_id", "segments"] + feature_cols)
        for d in diaries:
            w.writerow([d.donor_id, format_segments(d.segments)] + [_fmt(d.features[c]) for c in feature_cols])


def load_buildings(path) -> list[BuildingRecord]:
    out = []
    seen = set()
    fh, reader = _reader(path, BUILDING_COLUMNS)
    with fh:
        feature_cols = [c for c in reader.fieldnames if c not in BUILDING_COLUMNS]
        for row_no, row in enumerate(reader, start=1):
            bid = row["building_id"].strip()
            if bid in seen:
                raise DuplicateKey(path, row_no, f"duplicate building_id {bid}")
            seen.add(bid)
            feats = {}
            for c in feature_cols:
                if row[c] is None or row[c].strip() == "":
                    raise BadValue(path, row_no, f"building {bid}: feature {c!r} is empty")
                feats[c] = _feature(row[c].strip())
            bulbs = {k: _number(path, row_no, c, row[c], int) for k, c in BULB_COLUMNS.items()}
            if any(n < 0 for n in bulbs.values()):
                raise BadValue(path, row_no, f"building {bid}: negative bulb count")
            out.append(
                BuildingRecord(
                    donor_id=bid,
                    features=feats,
                    floor_area=_number(path, row_no, "floor_area", row["floor_area"]),
                    stories=_number(path, row_no, "stories", row["stories"], int),
                    has_dishwasher=_flag(path, row_no, "has_dishwasher", row["has_dishwasher"]),
                    has_laundry=_flag(path, row_no, "has_laundry", row["has_laundry"]),
                    has_ac=_flag(path, row_no, "has_ac", row["has_ac"]),
                    water_heater_fuel=row["water_heater_fuel"].strip().lower(),
                    bulbs=bulbs,
                )
            )
    if not out:
        raise BadValue(path, None, "no building records")
    return out


def write_buildings(buildings: Sequence[BuildingRecord], path) -> None:
    feature_cols = sorted({k for b in buildings for k in b.features})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(BUILDING_COLUMNS) + feature_cols)
        for b in buildings:
            w.writerow(
                [
                    b.donor_id,
                    _fmt(b.floor_area),
                    b.stories,
                    _fmt(b.has_dishwasher),
                    _fmt(b.has_laundry),
                    _fmt(b.has_ac),
                    b.water_heater_fuel,
                    b.bulbs["Incandescent"],
                    b.bulbs["CFL"],
                    b.bulbs["LED"],
                ]
                + [_fmt(b.features[c]) for c in feature_cols]
            )


def load_donor_pool(diaries_path, buildings_path) -> DonorPool:
    return DonorPool(tuple(load_diaries(diaries_path)), tuple(load_buildings(buildings_path)))
