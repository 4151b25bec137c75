"""Seeded k-means++ / Lloyd clustering used by the spectral coarseners."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadConfig, SizeMismatch


@dataclass(frozen=True)
class KMeansConfig:
    restarts: int = 10
    max_iters: int = 100
    rel_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise BadConfig("restarts and max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise BadConfig("rel_tol must be positive")
        if not 0 <= self.seed < 2**64:
            raise BadConfig("seed must be a 64-bit unsigned integer")


@dataclass
class KMeansResult:
    labels: np.ndarray
    cost: float
    init_cost: float
    history: list[float] = field(default_factory=list)
    degenerate: bool = False


def clustering_cost(rows: np.ndarray, labels: np.ndarray, k: int | None = None) -> float:
    """Sum of squared distances of rows to their cluster means."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[:, None]
    labels = np.asarray(labels)
    k = int(labels.max()) + 1 if k is None else k
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.zeros((k, rows.shape[1]))
    np.add.at(sums, labels, rows)
    means = sums / np.maximum(counts, 1.0)[:, None]
    return float(np.sum((rows - means[labels]) ** 2))


def _sq_dists(rows: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = (
        np.sum(rows**2, axis=1)[:, None]
        - 2.0 * rows @ centers.T
        + np.sum(centers**2, axis=1)[None, :]
    )
    return np.maximum(d, 0.0)


def _plus_plus(rows: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    N = rows.shape[0]
    chosen = [int(rng.integers(N))]
    closest = np.sum((rows - rows[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(N, p=closest / total))
        else:
            # every point coincides with a center; take an unused index
            unused = np.setdiff1d(np.arange(N), chosen)
            idx = int(unused[rng.integers(unused.size)])
        chosen.append(idx)
        closest = np.minimum(closest, np.sum((rows - rows[idx]) ** 2, axis=1))
    return np.array(chosen)


def _repair_empty(rows, labels, centers, k):
    """Give each empty cluster the point farthest from its centroid (from a cluster of size > 1)."""
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        dist = np.sum((rows - centers[labels]) ** 2, axis=1)
        dist[counts[labels] <= 1] = -1.0
        far = int(np.argmax(dist))
        counts[labels[far]] -= 1
        labels[far] = c
        counts[c] = 1
        centers[c] = rows[far]
    return labels


def _means(rows, labels, k):
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.zeros((k, rows.shape[1]))
    np.add.at(sums, labels, rows)
    return sums / counts[:, None]


def _hartigan(rows, labels, k, max_sweeps):
    """Single-point moves that lower the cost once centroid shifts are counted.

    Removes Lloyd fixed points where one point sits on the wrong side of a
    size-weighted boundary.
    """
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    means = _means(rows, labels, k)
    for _ in range(max_sweeps):
        moved = False
        for i in range(rows.shape[0]):
            a = labels[i]
            if counts[a] <= 1:
                continue
            d = np.sum((means - rows[i]) ** 2, axis=1)
            gain = counts / (counts + 1.0) * d
            loss = counts[a] / (counts[a] - 1.0) * d[a]
            gain[a] = np.inf
            b = int(np.argmin(gain))
            if gain[b] < loss * (1.0 - 1e-12):
                means[a] = (means[a] * counts[a] - rows[i]) / (counts[a] - 1.0)
                means[b] = (means[b] * counts[b] + rows[i]) / (counts[b] + 1.0)
                counts[a] -= 1.0
                counts[b] += 1.0
                labels[i] = b
                moved = True
        if not moved:
            break
    return labels


def _lloyd(rows, k, centers, max_iters, rel_tol) -> KMeansResult:
    labels = np.argmin(_sq_dists(rows, centers), axis=1)
    labels = _repair_empty(rows, labels, centers, k)
    init_cost = float(np.sum((rows - centers[labels]) ** 2))
    cost = clustering_cost(rows, labels, k)
    history = [cost]
    for _ in range(max_iters):
        centers = _means(rows, labels, k)
        new = np.argmin(_sq_dists(rows, centers), axis=1)
        new = _repair_empty(rows, new, centers, k)
        new_cost = clustering_cost(rows, new, k)
        if new_cost > cost:
            # reassignment in floating point can tick the cost upward by an ulp
            break
        changed = not np.array_equal(new, labels)
        labels, prev, cost = new, cost, new_cost
        history.append(cost)
        if not changed or prev - cost <= rel_tol * max(prev, 1e-300):
            break
    refined = _hartigan(rows, labels, k, max_iters)
    refined_cost = clustering_cost(rows, refined, k)
    if refined_cost < cost:
        labels, cost = refined, refined_cost
        history.append(cost)
    return KMeansResult(labels=labels, cost=cost, init_cost=init_cost, history=history)


def kmeans(rows, k: int, cfg: KMeansConfig = KMeansConfig(), stream: tuple[int, ...] = ()) -> KMeansResult:
    """Best of ``cfg.restarts`` seeded k-means++ / Lloyd runs, each polished by single-point moves.

    ``stream`` selects an independent RNG stream for the same seed, so
    callers can run several clusterings from one config reproducibly.
    The result always has exactly ``k`` non-empty clusters; ``degenerate``
    is set when ``k`` exceeds the number of distinct rows.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[:, None]
    N = rows.shape[0]
    if not 1 <= k <= N:
        raise SizeMismatch(f"k={k} must lie in [1, {N}]")
    degenerate = k > np.unique(rows, axis=0).shape[0]
    best = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(*stream, r)))
        centers = rows[_plus_plus(rows, k, rng)].copy()
        res = _lloyd(rows, k, centers, cfg.max_iters, cfg.rel_tol)
        if best is None or res.cost < best.cost:
            best = res
    best.degenerate = degenerate
    return best
