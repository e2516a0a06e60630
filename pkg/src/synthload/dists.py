"""Parametric distributions as they appear in config: ``{"dist": ..., "mu": ..., "sigma": ...}``.

Log-normal parameters are those of the underlying normal.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np


def draw(spec: Mapping, rng: np.random.Generator, size=None):
    kind = spec.get("dist", "normal")
    mu, sigma = float(spec["mu"]), float(spec["sigma"])
    if kind == "normal":
        return rng.normal(mu, sigma, size)
    if kind == "lognormal":
        return rng.lognormal(mu, sigma, size)
    raise ValueError(f"unsupported distribution {kind!r}")


def draw_positive(spec: Mapping, rng: np.random.Generator, tries: int = 10) -> float:
    """Redraw non-positive samples up to ``tries`` times, then fall back to the mean."""
    for _ in range(tries):
        x = float(draw(spec, rng))
        if x > 0:
            return x
    return float(spec["mu"]) if spec.get("dist", "normal") == "normal" else float(np.exp(spec["mu"]))


def mean(spec: Mapping) -> float:
    mu, sigma = float(spec["mu"]), float(spec["sigma"])
    if spec.get("dist", "normal") == "lognormal":
        return float(np.exp(mu + sigma**2 / 2))
    return mu
