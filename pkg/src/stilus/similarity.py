"""Vector metrics and pairwise similarity matrices.

Cosine similarity is the primary closeness measure (range [-1, 1]);
euclidean distance complements it. Zero vectors make cosine undefined
and raise rather than silently masquerading as "no correlation".
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MetricError, ValidationError

__all__ = [
    "SimilarityMatrix",
    "cosine",
    "euclidean",
    "similarity_matrix",
    "minmax_rescale",
    "write_matrix_csv",
]


@dataclass
class SimilarityMatrix:
    """Square symmetric matrix with one label per row/column."""

    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValidationError("similarity matrix must be square")
        if len(self.labels) != self.values.shape[0]:
            raise ValidationError("label count must match matrix size")
        if self.values.size and np.abs(self.values - self.values.T).max() > 1e-9:
            raise ValidationError("similarity matrix must be symmetric")
        self.labels = tuple(str(name) for name in self.labels)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def off_diagonal(self) -> np.ndarray:
        """Flat view of all off-diagonal entries."""
        mask = ~np.eye(self.size, dtype=bool)
        return self.values[mask]


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a 1-D vector")
    return arr


def cosine(v, w) -> float:
    """Cosine of the angle between v and w, clamped to [-1, 1]."""
    v = _as_vector(v, "v")
    w = _as_vector(w, "w")
    if v.shape[0] != w.shape[0]:
        raise ValidationError(f"dim mismatch: {v.shape[0]} vs {w.shape[0]}")
    nv = float(np.linalg.norm(v))
    nw = float(np.linalg.norm(w))
    if nv == 0.0 or nw == 0.0:
        raise MetricError("cosine similarity is undefined for a zero vector")
    value = float(np.dot(v, w)) / (nv * nw)
    return min(1.0, max(-1.0, value))


def euclidean(v, w) -> float:
    v = _as_vector(v, "v")
    w = _as_vector(w, "w")
    if v.shape[0] != w.shape[0]:
        raise ValidationError(f"dim mismatch: {v.shape[0]} vs {w.shape[0]}")
    return float(np.sqrt(np.sum((v - w) ** 2)))


def similarity_matrix(vectors, labels: list[str]) -> SimilarityMatrix:
    """Pairwise cosine matrix with unit diagonal.

    The upper triangle is computed once and mirrored, so symmetry is
    exact by construction.
    """
    data = np.asarray(vectors, dtype=np.float64)
    if data.ndim != 2:
        raise ValidationError("vectors must form a 2-D array")
    n = data.shape[0]
    if len(labels) != n:
        raise ValidationError("label count must match vector count")
    norms = np.linalg.norm(data, axis=1)
    for i, norm in enumerate(norms):
        if norm == 0.0:
            raise MetricError(f"vector {i} ({labels[i]!r}) has zero norm; cosine is undefined")

    unit = data / norms[:, None]
    values = np.clip(unit @ unit.T, -1.0, 1.0)
    upper = np.triu_indices(n, k=1)
    values[(upper[1], upper[0])] = values[upper]
    np.fill_diagonal(values, 1.0)
    return SimilarityMatrix(values=values, labels=tuple(labels))


def minmax_rescale(matrix: SimilarityMatrix) -> SimilarityMatrix:
    """Affinely map off-diagonal entries onto [0, 1]; pin the diagonal to 1.

    Self-similarities carry no relationship information, so the min and
    max are taken over off-diagonal entries only. A degenerate range
    (all off-diagonal entries equal) maps them all to 0.
    """
    n = matrix.size
    if n < 2:
        raise ValidationError("min-max rescaling needs at least a 2x2 matrix")
    off = matrix.off_diagonal()
    lo = float(off.min())
    hi = float(off.max())
    if hi == lo:
        values = np.zeros_like(matrix.values)
    else:
        values = (matrix.values - lo) / (hi - lo)
    np.fill_diagonal(values, 1.0)
    return SimilarityMatrix(values=values, labels=matrix.labels)


def write_matrix_csv(matrix: SimilarityMatrix, path: str | Path) -> None:
    """CSV with a leading label row and column; doubles at full precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["", *matrix.labels])
        for name, row in zip(matrix.labels, matrix.values):
            writer.writerow([name, *(repr(float(x)) for x in row)])
