"""Small builders for hand-made households used across the unit tests."""

from synthload.core import MINUTES, BulbKind, ClimateZone, DiaryRecord, Dwelling, Household, Person


def diary(segments, did="d0", **features):
    return DiaryRecord(did, features, tuple(segments))


def home_all_day(did="home"):
    return diary([(0, MINUTES, "home")], did)


def asleep_all_day(did="sleep"):
    return diary([(0, MINUTES, "sleep")], did)


def dwelling(**kw):
    base = dict(
        floor_area=2000.0,
        wall_area=1431.1,
        stories=1,
        r_roof=30.0,
        r_wall=19.0,
        hvac_efficiency=1.0,
        heater_efficiency=1.0,
        setpoint_heat=68.0,
        setpoint_cool=76.0,
        has_dishwasher=True,
        has_laundry=True,
        has_ac=True,
        has_electric_water_heater=True,
        lighting_units=((BulbKind.Incandescent, 60.0), (BulbKind.CFL, 14.0), (BulbKind.LED, 9.0)),
        water_heater_efficiency=0.9,
    )
    base.update(kw)
    return Dwelling(**base)


def household(diaries, hid="h1", zone=ClimateZone.MixedHumid, dw=None, income=60000.0, ages=None):
    ages = ages or [40] * len(diaries)
    members = tuple(Person(f"{hid}-{i}", a, True, d) for i, (a, d) in enumerate(zip(ages, diaries)))
    return Household(hid, "51013", "VA", zone, members, income, dw if dw is not None else dwelling())
