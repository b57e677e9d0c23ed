"""K-means with seeded k-means++ initialization, and the label-agreement
accuracy score backed by an optimal cluster-to-author assignment.

All randomness flows from one integer seed through a SplitMix64 stream,
so a fixed (data, k, seed) triple reproduces bit-identical fits on every
platform. Clustering operates on raw vectors with euclidean distance; no
normalization is inserted.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import LabelVector
from .embedding import EmbeddingMatrix
from .errors import ValidationError
from .rng import SplitMix64

__all__ = ["KMeansFit", "AccuracyReport", "kmeans", "accuracy", "hungarian"]


@dataclass
class KMeansFit:
    assignments: np.ndarray  # (n,) cluster index per row
    centroids: np.ndarray  # (k, d)
    inertia: float  # sum of squared distances to assigned centroids
    iterations: int
    seed: int
    inertia_history: tuple[float, ...]  # one entry per assignment step, plus final


@dataclass
class AccuracyReport:
    accuracy: float
    mapping: dict[int, int]  # cluster index -> author index (a bijection)
    confusion: np.ndarray  # (k, k) counts, [cluster][author]


def _as_rows(data) -> np.ndarray:
    if isinstance(data, EmbeddingMatrix):
        return data.vectors
    return np.asarray(data, dtype=np.float64)


def _sq_dist_to(rows: np.ndarray, point: np.ndarray) -> np.ndarray:
    diff = rows - point
    return np.einsum("ij,ij->i", diff, diff)


def _kmeanspp_init(rows: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    """k-means++ seeding on the SplitMix64 stream.

    First centroid: row next_u64() % n. Each later draw takes
    r = next_float() * total over the running minimum squared distances
    and picks the first row whose cumulative sum exceeds r (the total is
    read from the cumulative sum itself so the comparison is consistent).
    If every candidate distance is zero, the pick falls back to
    next_u64() % n.
    """
    n = rows.shape[0]
    chosen = rng.next_below(n)
    centroids = [rows[chosen]]
    d2 = _sq_dist_to(rows, rows[chosen])
    for _ in range(1, k):
        cum = np.cumsum(d2)
        total = float(cum[-1])
        if total <= 0.0:
            chosen = rng.next_below(n)
        else:
            r = rng.next_float() * total
            chosen = int(np.searchsorted(cum, r, side="right"))
            if chosen >= n:  # guard against float edge at the right end
                chosen = n - 1
        centroids.append(rows[chosen])
        d2 = np.minimum(d2, _sq_dist_to(rows, rows[chosen]))
    return np.array(centroids)


def _nearest(rows: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Index of the nearest centroid per row; ties go to the lowest index."""
    # ||x - c||^2 minus the per-row ||x||^2 term, which cannot change the
    # argmin; np.argmin returns the first (lowest) minimizer.
    cross = rows @ centroids.T
    c_sq = np.einsum("ij,ij->i", centroids, centroids)
    return np.argmin(c_sq[None, :] - 2.0 * cross, axis=1)


def _repair_empty(
    assign: np.ndarray, counts: np.ndarray, dmin: np.ndarray, k: int
) -> None:
    """Refill empty clusters by stealing the worst-fitted rows.

    Empty clusters are processed in ascending index order; each steals the
    row with the largest distance to its assigned centroid (ties to the
    lowest row index). A stolen row cannot be stolen again, so each repair
    fills its cluster permanently and the loop ends within k passes.
    """
    priority = dmin.copy()
    for _ in range(k):
        empties = np.flatnonzero(counts == 0)
        if empties.size == 0:
            return
        target = int(empties[0])
        row = int(np.argmax(priority))
        donor = int(assign[row])
        assign[row] = target
        counts[target] += 1
        counts[donor] -= 1
        priority[row] = -1.0
    if (counts == 0).any():
        raise AssertionError("empty-cluster repair did not converge")


def kmeans(
    data,
    k: int,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KMeansFit:
    """Lloyd's algorithm with k-means++ seeding.

    Iterations assign each row to its nearest centroid by euclidean
    distance (ties to the lowest centroid index), then recompute each
    centroid as the mean of its assigned rows, refilling empty clusters
    by farthest-point stealing. The loop stops when the centroid movement
    max-norm drops below tol or max_iter is reached. Returned centroids
    are exactly the means of the final assignments.
    """
    rows = _as_rows(data)
    if rows.ndim != 2:
        raise ValidationError("data must be a 2-D matrix")
    n = rows.shape[0]
    if k < 1:
        raise ValidationError("k must be at least 1")
    if n < k:
        raise ValidationError(f"cannot fit {k} clusters to {n} rows")
    if max_iter < 1:
        raise ValidationError("max_iter must be at least 1")
    if rows.size and not np.isfinite(rows).all():
        raise ValidationError("data contains non-finite values")

    rng = SplitMix64(seed)
    centroids = _kmeanspp_init(rows, k, rng)
    history: list[float] = []
    assign = np.zeros(n, dtype=np.int64)
    iterations = 0

    for iterations in range(1, max_iter + 1):
        assign = _nearest(rows, centroids)
        diff = rows - centroids[assign]
        dmin = np.einsum("ij,ij->i", diff, diff)
        history.append(float(dmin.sum()))

        counts = np.bincount(assign, minlength=k)
        if (counts == 0).any():
            _repair_empty(assign, counts, dmin, k)

        new_centroids = np.empty_like(centroids)
        for j in range(k):
            new_centroids[j] = rows[assign == j].mean(axis=0)

        movement = float(np.abs(new_centroids - centroids).max())
        centroids = new_centroids
        if movement < tol:
            break

    final_diff = rows - centroids[assign]
    inertia = float(np.einsum("ij,ij->i", final_diff, final_diff).sum())
    history.append(inertia)

    return KMeansFit(
        assignments=assign.astype(np.int64),
        centroids=centroids,
        inertia=inertia,
        iterations=iterations,
        seed=seed,
        inertia_history=tuple(history),
    )


def hungarian(cost) -> np.ndarray:
    """Minimum-cost perfect assignment on a square matrix.

    Returns an array a with a[row] = column such that sum(cost[row, a[row]])
    is minimal, via the O(n^3) potentials / shortest-augmenting-path
    formulation.
    """
    matrix = np.asarray(cost, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError("cost matrix must be square")
    if matrix.size == 0:
        raise ValidationError("cost matrix must be non-empty")
    if not np.isfinite(matrix).all():
        raise ValidationError("cost matrix must be finite")

    n = matrix.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=np.int64)  # match[j] = row assigned to column j; 0 = free
    way = np.zeros(n + 1, dtype=np.int64)

    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            free = ~used[1:]
            reduced = matrix[i0 - 1, :] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0

            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]

            u[match[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta

            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = int(way[j0])
            match[j0] = match[j1]
            j0 = j1

    result = np.zeros(n, dtype=np.int64)
    for j in range(1, n + 1):
        result[match[j] - 1] = j - 1
    return result


def accuracy(assignments, truth) -> AccuracyReport:
    """Fraction of units whose cluster maps to their true author under the
    matched-count-maximizing bijection.

    The bijection is found by running the assignment solver on negated
    confusion counts; it is deterministic and never double-assigns an
    author, unlike greedy majority voting.
    """
    clusters = np.asarray(assignments, dtype=np.int64)
    labels = truth.labels if isinstance(truth, LabelVector) else np.asarray(truth, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if clusters.ndim != 1 or labels.ndim != 1:
        raise ValidationError("assignments and truth must be 1-D")
    if clusters.shape[0] != labels.shape[0]:
        raise ValidationError(
            f"length mismatch: {clusters.shape[0]} assignments vs {labels.shape[0]} labels"
        )
    if clusters.shape[0] == 0:
        raise ValidationError("accuracy is undefined for empty label vectors")
    if clusters.min() < 0 or labels.min() < 0:
        raise ValidationError("labels must be non-negative")

    k_clusters = int(clusters.max()) + 1
    k_authors = int(labels.max()) + 1
    if k_clusters != k_authors:
        raise ValidationError(
            f"cluster count {k_clusters} != author count {k_authors}; "
            "clustering must run with k equal to the number of authors"
        )
    k = k_clusters

    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (clusters, labels), 1)

    assignment = hungarian(-confusion.astype(np.float64))
    matched = int(confusion[np.arange(k), assignment].sum())
    mapping = {int(c): int(a) for c, a in enumerate(assignment)}
    return AccuracyReport(
        accuracy=matched / clusters.shape[0],
        mapping=mapping,
        confusion=confusion,
    )
