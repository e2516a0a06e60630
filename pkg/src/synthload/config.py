"""Run configuration: a single JSON document with one section per model.

Every default below can be overridden from the config file; sections are
deep-merged so a file only needs the keys it changes.
"""

from __future__ import annotations

import copy
import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping


class ConfigError(ValueError):
    """Raised when a configuration document is incomplete or inconsistent."""


ZONE_NAMES = ("Marine", "HotDry", "HotHumid", "MixedHumid", "Cold")

DEFAULTS: dict[str, Any] = {
    "ingest": {
        "temp_band_f": [-60.0, 135.0],
    },
    "enrichment": {
        # feature specs: {"feature": name, "edges": [...]} cut points, or {"feature": name, "categories": [...]}
        "diary_match": [
            {"feature": "worker", "categories": [0, 1]},
            {"feature": "age", "edges": [35, 60]},
            {"feature": "hsize", "edges": [2, 3]},
        ],
        "building_match": [
            {"feature": "hsize", "edges": [2, 3]},
            {"feature": "income", "edges": [50000, 100000]},
        ],
        "ceiling_height_ft": 8.0,
        "setpoint_heat_f": 68.0,
        "setpoint_cool_f": 76.0,
        "heater_efficiency": 1.0,
        "hvac_efficiency": 1.0,
        "water_heater_efficiency": [0.80, 0.99],
        "shuffle_bulbs": True,
        "zones": {
            "Marine": {"r_roof": 38.0, "r_wall": 20.0},
            "HotDry": {"r_roof": 30.0, "r_wall": 13.0},
            "HotHumid": {"r_roof": 30.0, "r_wall": 13.0},
            "MixedHumid": {"r_roof": 38.0, "r_wall": 20.0},
            "Cold": {"r_roof": 49.0, "r_wall": 21.0},
        },
    },
    "thermal": {
        "btu_per_kwh": 3412.14,
        "kwh_per_gal_degf": 0.00189,
        "min_flow_gpm": 0.05,
        "min_duration_min": 1.0,
        "p_bathe": 0.85,
        "p_bath": 0.1,
        "events": {
            "Shower": {
                "t_hot_f": [105.0, 116.0],
                "flow_gpm": {"dist": "normal", "mu": 2.25, "sigma": 0.68},
                "duration_min": {"dist": "normal", "mu": 7.81, "sigma": 3.52},
            },
            "Bath": {
                "t_hot_f": [105.0, 116.0],
                "flow_gpm": {"dist": "normal", "mu": 4.40, "sigma": 1.17},
                "duration_min": {"dist": "normal", "mu": 5.65, "sigma": 2.09},
            },
            "Dishwasher": {
                "t_hot_f": [120.0, 140.0],
                "flow_gpm": {"dist": "normal", "mu": 1.39, "sigma": 0.20},
                "duration_min": {"dist": "lognormal", "mu": 1.53, "sigma": 0.41},
            },
            "ClothesWasher": {
                "t_hot_f": [60.0, 130.0],
                "flow_gpm": {"dist": "normal", "mu": 2.20, "sigma": 0.62},
                "duration_min": {"dist": "normal", "mu": 3.05, "sigma": 1.62},
            },
        },
    },
    "lighting": {
        "gamma": 0.05,
        "threshold_w_m2": {"mu": 60.0, "sigma": 10.0},
        "duration_minutes": [1, 15, 30, 60, 120, 240],
        "duration_decay": 0.8,
        "effective_occupancy": {"1": 1.0, "2": 1.44, "3": 1.70, "4": 1.90},
        "bulb_watts": {"Incandescent": 60.0, "CFL": 14.0, "LED": 9.0},
        # "extend": a switch-on of a lit bulb keeps the longer remaining time;
        # "skip": lit bulbs are not offered a switch-on.
        "relight": "extend",
    },
    "activities": {
        "dwasher": {
            "mode": "SemiAutomatic",
            "max_daily": 2,
            "duration_min": {"dist": "normal", "mu": 90.0, "sigma": 30.0},
            "power_w": {"dishwasher": {"dist": "normal", "mu": 900.0, "sigma": 100.0}},
            "needs_hot_water": True,
        },
        "cwasher": {
            "mode": "SemiAutomatic",
            "max_daily": 2,
            "duration_min": {"dist": "normal", "mu": 45.0, "sigma": 20.0},
            "power_w": {"clothes_washer": {"dist": "normal", "mu": 400.0, "sigma": 50.0}},
            "needs_hot_water": True,
        },
        "cdryer": {
            "mode": "SemiAutomatic",
            "max_daily": 2,
            "duration_min": {"dist": "normal", "mu": 45.0, "sigma": 20.0},
            "power_w": {"clothes_dryer": {"dist": "normal", "mu": 2500.0, "sigma": 200.0}},
            "needs_hot_water": False,
        },
        "cook": {
            "mode": "Manual",
            "max_daily": 3,
            "duration_min": {"dist": "lognormal", "mu": 3.0, "sigma": 0.96},
            "power_w": {
                "oven": {"dist": "normal", "mu": 1426.0, "sigma": 13.3},
                "microwave": {"dist": "normal", "mu": 880.0, "sigma": 14.0},
                "cooktop_large": {"dist": "normal", "mu": 213.0, "sigma": 1.2},
                "cooktop_small": {"dist": "normal", "mu": 393.0, "sigma": 3.1},
            },
            "appliance_pmf": {"oven": 0.2, "microwave": 0.3, "cooktop_large": 0.25, "cooktop_small": 0.25},
            "needs_hot_water": False,
        },
        "tv": {
            "mode": "Manual",
            "max_daily": None,
            "max_daily_hours": 10.0,
            "duration_min": {"dist": "lognormal", "mu": 4.24, "sigma": 0.79},
            "power_w": {"television": {"dist": "normal", "mu": 120.0, "sigma": 20.0}},
            "needs_hot_water": False,
        },
        "computer": {
            "mode": "Manual",
            "max_daily": None,
            "max_sessions": 4,
            "duration_min": {"dist": "normal", "mu": 90.0, "sigma": 30.0},
            "power_w": {
                "desktop": {"dist": "normal", "mu": 191.5, "sigma": 32.7},
                "notebook": {"dist": "normal", "mu": 60.5, "sigma": 20.5},
            },
            "appliance_pmf": {"desktop": 0.5, "notebook": 0.5},
            "needs_hot_water": False,
        },
        "cleaning": {
            "mode": "Manual",
            "max_daily": 1,
            "duration_min": {"dist": "normal", "mu": 30.0, "sigma": 15.0},
            "power_w": {"vacuum": {"dist": "normal", "mu": 1200.0, "sigma": 300.0}},
            "needs_hot_water": False,
        },
    },
    "refrigerator": {
        "beta0": 0.55,
        "beta_temp": 0.005,
        "zone_offsets": {"Marine": 0.0, "HotDry": 0.08, "HotHumid": 0.08, "MixedHumid": 0.03, "Cold": 0.0},
        "noise_frac": 0.1,
    },
    "calibration": {
        "sample_households": 200,
        "gamma_bounds": [1e-3, 1e3],
        "rel_tol": 0.005,
        "max_iter": 60,
    },
}


def deep_merge(base: Mapping, override: Mapping) -> dict:
    out = copy.deepcopy(dict(base))
    for key, val in override.items():
        if isinstance(val, Mapping) and isinstance(out.get(key), Mapping):
            out[key] = deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def default_sections() -> dict:
    return copy.deepcopy(DEFAULTS)


@dataclass
class RunConfig:
    seed: int
    dates: list[dt.date]
    population: Path
    weather: Path
    irradiance: Path
    diaries: Path
    buildings: Path
    output_root: Path
    inlet_temps: Path | None = None
    worker_count: int = 1
    sections: dict = field(default_factory=default_sections)

    def __post_init__(self):
        if not self.dates:
            raise ConfigError("dates must be a nonempty list")
        if self.seed is None:
            raise ConfigError("seed is required; there is no wall-clock default")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.worker_count < 1:
            raise ConfigError(f"worker_count must be >= 1, got {self.worker_count}")

    @classmethod
    def from_dict(cls, doc: Mapping, seed: int | None = None, workers: int | None = None) -> "RunConfig":
        paths = doc.get("paths", {})
        try:
            dates = [dt.date.fromisoformat(d) for d in doc["dates"]]
        except KeyError:
            raise ConfigError("config is missing 'dates'") from None
        except ValueError as exc:
            raise ConfigError(f"bad date in 'dates': {exc}") from None
        missing = [k for k in ("population", "weather", "irradiance", "diaries", "buildings") if k not in paths]
        if missing:
            raise ConfigError(f"config 'paths' is missing {missing}")
        sections = deep_merge(DEFAULTS, {k: v for k, v in doc.items() if k in DEFAULTS})
        return cls(
            seed=seed if seed is not None else doc.get("seed"),
            dates=dates,
            population=Path(paths["population"]),
            weather=Path(paths["weather"]),
            irradiance=Path(paths["irradiance"]),
            diaries=Path(paths["diaries"]),
            buildings=Path(paths["buildings"]),
            inlet_temps=Path(paths["inlet_temps"]) if paths.get("inlet_temps") else None,
            output_root=Path(doc.get("output_root", "out")),
            worker_count=int(workers if workers is not None else doc.get("workers", 1)),
            sections=sections,
        )

    def to_dict(self) -> dict:
        paths = {
            "population": str(self.population),
            "weather": str(self.weather),
            "irradiance": str(self.irradiance),
            "diaries": str(self.diaries),
            "buildings": str(self.buildings),
        }
        if self.inlet_temps is not None:
            paths["inlet_temps"] = str(self.inlet_temps)
        return {
            "seed": self.seed,
            "dates": [d.isoformat() for d in self.dates],
            "paths": paths,
            "output_root": str(self.output_root),
            "workers": self.worker_count,
            **copy.deepcopy(self.sections),
        }


def load_config(path: str | Path, seed: int | None = None, workers: int | None = None) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return RunConfig.from_dict(doc, seed=seed, workers=workers)
