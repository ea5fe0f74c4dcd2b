"""K-means (Lloyd) clustering of the nine engagement metrics into L/M/H.

Clustering runs on raw (pre-discretization) metrics: rounding to tens
destroys the cluster geometry for the small count metrics. Levels are
assigned by ordering the three centroids on their mean over the five
frequency-count dimensions -- submission delays are excluded from that
score because a longer delay is not higher engagement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .errors import InsufficientDataError, LevelMappingError
from .etl import METRIC_FIELDS, EngagementMetrics

COUNT_DIMS = slice(0, 5)  # the five frequency metrics lead METRIC_FIELDS
LEVELS = ("L", "M", "H")


@dataclass
class FeatureMatrix:
    """One 9-dimensional row per student plus the ids and scaling record."""

    rows: np.ndarray
    row_ids: tuple[str, ...]
    scaling: tuple[tuple[float, float], ...] | None = None


def matrix_from_metrics(metrics: Mapping[str, EngagementMetrics]) -> FeatureMatrix:
    """Stack raw metrics into a matrix, students sorted by id.

    Missing submission delays are imputed with the dimension's observed
    maximum (never submitting reads as the slowest submission); a fully
    absent dimension becomes zeros.
    """
    ids = tuple(sorted(metrics))
    rows = np.full((len(ids), len(METRIC_FIELDS)), np.nan)
    for i, sid in enumerate(ids):
        met = metrics[sid]
        rows[i] = [
            np.nan if (v := getattr(met, f)) is None else float(v)
            for f in METRIC_FIELDS
        ]
    for j in range(rows.shape[1]):
        col = rows[:, j]
        missing = np.isnan(col)
        if missing.any():
            fill = col[~missing].max() if (~missing).any() else 0.0
            col[missing] = fill
    return FeatureMatrix(rows=rows, row_ids=ids)


def normalize(matrix: FeatureMatrix) -> FeatureMatrix:
    """Min-max scale each dimension to [0, 1]; constant dimensions map to 0."""
    if matrix.rows.size == 0:
        raise InsufficientDataError("cannot normalize an empty matrix")
    lo = matrix.rows.min(axis=0)
    hi = matrix.rows.max(axis=0)
    span = hi - lo
    scaled = np.zeros_like(matrix.rows, dtype=float)
    nonconstant = span > 0
    scaled[:, nonconstant] = (matrix.rows[:, nonconstant] - lo[nonconstant]) / span[
        nonconstant
    ]
    return replace(
        matrix,
        rows=scaled,
        scaling=tuple((float(a), float(b)) for a, b in zip(lo, hi)),
    )


@dataclass
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    inertia_history: list[float]
    n_iter: int


def kmeans(
    matrix: FeatureMatrix,
    k: int = 3,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KMeansResult:
    """Lloyd iteration with seeded farthest-point initialization.

    Deterministic given the seed; the per-iteration inertia sequence is
    checked to be non-increasing, and an emptied cluster is repaired by
    promoting the point farthest from its current centroid.
    """
    x = np.asarray(matrix.rows, dtype=float)
    n = x.shape[0]
    if n < k:
        raise InsufficientDataError(f"{n} rows cannot form {k} clusters")

    rng = np.random.Generator(np.random.PCG64(seed))
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(k - 1):
        nxt = int(np.argmax(d2))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    centroids = x[chosen].copy()

    history: list[float] = []
    assignments = np.zeros(n, dtype=np.intp)
    iteration = 0
    for iteration in range(1, max_iter + 1):
        dist2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assignments = dist2.argmin(axis=1)
        point_cost = dist2[np.arange(n), assignments]
        inertia = float(point_cost.sum())
        if history:
            assert inertia <= history[-1] + 1e-9, "inertia increased"
        history.append(inertia)

        new_centroids = centroids.copy()
        for j in range(k):
            members = assignments == j
            if members.any():
                new_centroids[j] = x[members].mean(axis=0)
        empty = [j for j in range(k) if not (assignments == j).any()]
        for j in empty:
            far = int(np.argmax(point_cost))
            new_centroids[j] = x[far]
            assignments[far] = j
            point_cost[far] = 0.0

        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < tol:
            break

    dist2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assignments = dist2.argmin(axis=1)
    inertia = float(dist2[np.arange(n), assignments].sum())
    if history:
        assert inertia <= history[-1] + 1e-9, "inertia increased"
    history.append(inertia)
    return KMeansResult(
        assignments=assignments,
        centroids=centroids,
        inertia=inertia,
        inertia_history=history,
        n_iter=iteration,
    )


def label_levels(centroids: np.ndarray, assignments: np.ndarray) -> list[str]:
    """Map three clusters to L/M/H by ascending count-metric centroid mean.

    Ties break on the num_logins coordinate. The mapping depends only on
    centroid statistics, so permuting cluster indices never changes which
    student ends up with which label.
    """
    if centroids.shape[0] != 3:
        raise LevelMappingError(
            f"level mapping needs exactly 3 clusters, got {centroids.shape[0]}"
        )
    score = centroids[:, COUNT_DIMS].mean(axis=1)
    order = np.lexsort((centroids[:, 0], score))
    label_of = {int(cluster): LEVELS[rank] for rank, cluster in enumerate(order)}
    return [label_of[int(a)] for a in assignments]


def assign_levels(
    metrics: Mapping[str, EngagementMetrics], seed: int = 0
) -> tuple[dict[str, str], KMeansResult, FeatureMatrix]:
    """normalize + kmeans(k=3) + label; returns per-student levels."""
    matrix = normalize(matrix_from_metrics(metrics))
    result = kmeans(matrix, k=3, seed=seed)
    labels = label_levels(result.centroids, result.assignments)
    return dict(zip(matrix.row_ids, labels)), result, matrix
