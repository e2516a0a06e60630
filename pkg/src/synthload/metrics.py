"""Validation metrics: histogram distances and load-shape coverage/closeness."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from synthload.core import HOURS


class EmptySamples(ValueError):
    pass


class EdgeMismatch(ValueError):
    pass


class ZeroTotal(ValueError):
    pass


class KTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if self.edges.ndim != 1 or self.edges.size != self.probs.size + 1:
            raise ValueError("histogram needs k+1 edges for k probabilities")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("histogram edges must be strictly ascending")
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError("histogram probabilities must be nonnegative and sum to 1")

    @classmethod
    def from_probs(cls, probs, edges=None) -> "Histogram":
        p = np.asarray(probs, dtype=float)
        p = p / p.sum()
        e = np.arange(p.size + 1, dtype=float) if edges is None else np.asarray(edges, dtype=float)
        return cls(e, p)


def histogram(samples, k_bins: int, value_range: tuple[float, float]) -> Histogram:
    """Equal-width histogram; samples outside the range fall into the end bins."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptySamples("cannot histogram an empty sample")
    lo, hi = float(value_range[0]), float(value_range[1])
    if not lo < hi:
        raise ValueError(f"histogram range needs min < max, got [{lo}, {hi}]")
    edges = np.linspace(lo, hi, int(k_bins) + 1)
    idx = np.clip(np.floor((x - lo) / (hi - lo) * k_bins).astype(int), 0, k_bins - 1)
    counts = np.bincount(idx, minlength=k_bins).astype(float)
    return Histogram(edges, counts / counts.sum())


def _check_edges(p: Histogram, q: Histogram):
    if p.edges.shape != q.edges.shape or not np.array_equal(p.edges, q.edges):
        raise EdgeMismatch("histograms must share identical bin edges")


def _kl2(a: np.ndarray, m: np.ndarray) -> float:
    nz = a > 0
    return float(np.sum(a[nz] * np.log2(a[nz] / m[nz])))


def js_distance(p: Histogram, q: Histogram) -> float:
    """Jensen-Shannon distance with base-2 logarithms, in [0, 1]."""
    _check_edges(p, q)
    m = 0.5 * (p.probs + q.probs)
    jsd = 0.5 * (_kl2(p.probs, m) + _kl2(q.probs, m))
    return float(np.sqrt(min(max(jsd, 0.0), 1.0)))


def hellinger(p: Histogram, q: Histogram) -> float:
    _check_edges(p, q)
    d = np.sqrt(p.probs) - np.sqrt(q.probs)
    return float(min(np.sqrt(np.sum(d * d) / 2.0), 1.0))


METRICS = {"js": js_distance, "hellinger": hellinger}


def distance_matrix(datasets: Mapping[str, Sequence[float]], metric: str = "js", bins: int = 50) -> tuple[list[str], np.ndarray]:
    """Pairwise distances between datasets binned on their common range."""
    if len(datasets) < 2:
        raise ValueError("distance matrix needs at least two datasets")
    fn = METRICS[metric]
    names = list(datasets)
    arrays = [np.asarray(datasets[n], dtype=float).ravel() for n in names]
    for n, a in zip(names, arrays):
        if a.size == 0:
            raise EmptySamples(f"dataset {n!r} is empty")
    lo = min(float(a.min()) for a in arrays)
    hi = max(float(a.max()) for a in arrays)
    if hi <= lo:
        hi = lo + 1.0
    hists = [histogram(a, bins, (lo, hi)) for a in arrays]
    k = len(names)
    mat = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            mat[i, j] = mat[j, i] = fn(hists[i], hists[j])
    return names, mat


def write_matrix_csv(path, names: Sequence[str], mat: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + list(names))
        for n, row in zip(names, mat):
            w.writerow([n] + [f"{v:.6f}" for v in row])


# --- load shapes --------------------------------------------------------------


def normalize_shape(profile) -> np.ndarray:
    e = np.asarray(profile, dtype=float)
    if e.shape != (HOURS,):
        raise ValueError(f"load shape needs {HOURS} hourly values")
    total = e.sum()
    if not total > 0:
        raise ZeroTotal("profile has zero total consumption")
    return e / total


def normalize_shapes(profiles) -> np.ndarray:
    """Row-normalise a stack of daily profiles, dropping zero-total rows."""
    x = np.asarray(profiles, dtype=float).reshape(-1, HOURS)
    s = x.sum(axis=1)
    keep = s > 0
    return x[keep] / s[keep, None]


@dataclass
class Clustering:
    k: int
    centers: np.ndarray
    labels: np.ndarray
    center_distances: np.ndarray
    iterations: int = 0

    @property
    def inertia(self) -> float:
        return float(np.sum(self.center_distances**2))


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def assign(shapes, centers) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-center labels (ties to the lowest index) and Euclidean distances."""
    x = np.atleast_2d(np.asarray(shapes, dtype=float))
    c = np.atleast_2d(np.asarray(centers, dtype=float))
    if c.shape[0] == 0:
        raise ValueError("need at least one center")
    if x.shape[0] == 0:
        return np.zeros(0, dtype=int), np.zeros(0)
    d2 = _sq_dists(x, c)
    labels = np.argmin(d2, axis=1)
    return labels, np.sqrt(d2[np.arange(x.shape[0]), labels])


def _kmeanspp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(free[rng.integers(free.size)])
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[chosen].copy()


def kmeans(shapes, k: int, seed: int, max_iter: int = 300, tol: float = 1e-8) -> Clustering:
    """k-means++ seeding followed by Lloyd iterations."""
    x = np.atleast_2d(np.asarray(shapes, dtype=float))
    n = x.shape[0]
    if k < 1:
        raise ValueError("k must be positive")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the {n} available shapes")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp(x, k, rng)
    it = 0
    for it in range(1, max_iter + 1):
        labels, dist = assign(x, centers)
        new = centers.copy()
        counts = np.bincount(labels, minlength=k)
        for j in range(k):
            if counts[j]:
                new[j] = x[labels == j].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            # reseed each empty cluster from the point currently farthest from its center
            order = np.argsort(-dist, kind="stable")
            for j, idx in zip(empty, order):
                new[j] = x[idx]
        shift = float(np.sqrt(((new - centers) ** 2).sum(axis=1)).max())
        centers = new
        if shift < tol and not empty.size:
            break
    labels, dist = assign(x, centers)
    return Clustering(k, centers, labels, dist, it)


def coverage(reference: Clustering, assigned_labels) -> float:
    """Fraction of the reference clusters that received at least one assigned point."""
    labels = np.asarray(assigned_labels, dtype=int)
    if labels.size == 0:
        return 0.0
    if labels.min() < 0 or labels.max() >= reference.k:
        raise ValueError("assigned labels must come from the reference clustering")
    return np.unique(labels).size / reference.k


def closeness(ref_distances, other_distances, bins: int = 30) -> float:
    """Hellinger distance between two center-distance distributions."""
    a = np.asarray(ref_distances, dtype=float).ravel()
    b = np.asarray(other_distances, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise EmptySamples("closeness needs two nonempty distance samples")
    hi = max(float(a.max()), float(b.max()))
    if hi <= 0:
        return 0.0
    return hellinger(histogram(a, bins, (0.0, hi)), histogram(b, bins, (0.0, hi)))


@dataclass(frozen=True)
class ShapeReport:
    k: int
    coverage_other_on_ref: float
    closeness_other_on_ref: float
    coverage_ref_on_other: float
    closeness_ref_on_other: float

    FIELDS = ("k", "coverage_other_on_ref", "closeness_other_on_ref", "coverage_ref_on_other", "closeness_ref_on_other")

    def row(self) -> list:
        return [getattr(self, f) for f in self.FIELDS]


def _one_way(base: np.ndarray, probe: np.ndarray, k: int, seed: int, bins: int) -> tuple[float, float]:
    cl = kmeans(base, k, seed)
    labels, dist = assign(probe, cl.centers)
    return coverage(cl, labels), closeness(cl.center_distances, dist, bins)


def shape_validate(ref_shapes, other_shapes, ks: Sequence[int], seed: int, bins: int = 30) -> list[ShapeReport]:
    """Coverage and closeness of two load-shape sets, clustering each side in turn."""
    ref = np.atleast_2d(np.asarray(ref_shapes, dtype=float))
    other = np.atleast_2d(np.asarray(other_shapes, dtype=float))
    out = []
    for k in ks:
        c1, d1 = _one_way(ref, other, int(k), seed, bins)
        c2, d2 = _one_way(other, ref, int(k), seed, bins)
        out.append(ShapeReport(int(k), c1, d1, c2, d2))
    return out


def write_shape_report(path, reports: Sequence[ShapeReport]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ShapeReport.FIELDS)
        for r in reports:
            w.writerow([r.k] + [f"{v:.6f}" for v in r.row()[1:]])
