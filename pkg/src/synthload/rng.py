"""Replayable random streams keyed by (seed, household, date, model tag).

Each stream is a Philox counter-based generator whose 128-bit key is a
BLAKE2b digest of the identifying tuple, so draws never depend on the order
in which households or days are processed.
"""

from __future__ import annotations

import datetime as dt
import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def stream_key(seed: int, hid: str, date: dt.date | str | None, tag: str) -> int:
    if not 0 <= seed <= SEED_MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    day = "" if date is None else (date.isoformat() if isinstance(date, dt.date) else str(date))
    payload = "\x1f".join((str(seed), str(hid), day, tag)).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=16).digest(), "little")


def stream(seed: int, hid: str, date: dt.date | str | None, tag: str) -> np.random.Generator:
    """Independent generator for one (household, date, model) cell.

    ``date=None`` is used for per-run draws such as donor matching.
    """
    return np.random.Generator(np.random.Philox(key=stream_key(seed, hid, date, tag)))
