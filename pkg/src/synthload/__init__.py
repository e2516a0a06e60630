"""Bottom-up synthetic residential electricity demand.

Households from a synthetic population are enriched with donor time-use
diaries and building records, then six end-use models (space conditioning,
water heating, lighting, refrigeration and diary-driven appliances) produce
hourly kWh profiles that are aggregated and written per county and day.
"""

from synthload.config import RunConfig, load_config
from synthload.core import ClimateZone, EndUse, aggregate_total
from synthload.pipeline import run

__all__ = ["ClimateZone", "EndUse", "RunConfig", "aggregate_total", "load_config", "run"]
__version__ = "0.1.0"
