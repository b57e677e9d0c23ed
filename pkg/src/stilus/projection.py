"""2-D projection of embedding matrices for scatter exports.

The built-in reducer is PCA via an iterated, deflated power method: it is
deterministic, needs no tuning, and the scatter CSV lets any external
reducer consume the raw embedding file instead.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import LabelVector
from .embedding import EmbeddingMatrix
from .errors import DegenerateDataError, LoadError, ValidationError
from .rng import SplitMix64

__all__ = ["Projection2D", "pca2", "export_scatter"]

_POWER_TOL = 1e-10
_POWER_MAX_ITER = 1000
# Fixed stream for start vectors: deterministic, and immune to the
# all-ones start landing orthogonal to a principal axis.
_START_SEED = 0x5CA77E2


@dataclass
class Projection2D:
    coords: np.ndarray  # (n, 2)
    labels: LabelVector | None
    explained_variance: tuple[float, float]  # first >= second >= 0


def _start_vector(rng: SplitMix64, d: int) -> np.ndarray:
    v = np.array([rng.next_float() - 0.5 for _ in range(d)])
    norm = float(np.linalg.norm(v))
    while norm == 0.0:
        v = np.array([rng.next_float() - 0.5 for _ in range(d)])
        norm = float(np.linalg.norm(v))
    return v / norm


def _dominant_eigenpair(
    cov: np.ndarray, prior: list[np.ndarray], rng: SplitMix64
) -> tuple[float, np.ndarray]:
    """Largest eigenpair of cov restricted orthogonal to prior components."""
    d = cov.shape[0]

    def orthogonalize(v: np.ndarray) -> np.ndarray:
        for p in prior:
            v = v - np.dot(p, v) * p
        return v

    for _ in range(d + 2):  # fresh start if a vector dies in the null space
        v = orthogonalize(_start_vector(rng, d))
        norm = float(np.linalg.norm(v))
        if norm < 1e-12:
            continue
        v /= norm
        converged = False
        for _ in range(_POWER_MAX_ITER):
            w = orthogonalize(cov @ v)
            norm = float(np.linalg.norm(w))
            if norm < 1e-300:
                # cov annihilates this direction: eigenvalue 0 on the
                # remaining subspace.
                return 0.0, v
            w /= norm
            if float(np.linalg.norm(w - v)) < _POWER_TOL:
                v = w
                converged = True
                break
            v = w
        eigenvalue = float(v @ cov @ v)
        return max(eigenvalue, 0.0), v
    return 0.0, _start_vector(rng, d)


def pca2(data, labels: LabelVector | None = None) -> Projection2D:
    """Project rows onto the top-2 principal axes.

    Columns are centered, the sample covariance's two dominant
    eigenvectors are extracted by the deflated power method (tolerance
    1e-10, at most 1000 iterations each), and each axis is oriented so
    its largest-magnitude loading is positive, removing the eigenvector
    sign ambiguity.
    """
    rows = data.vectors if isinstance(data, EmbeddingMatrix) else np.asarray(data, dtype=np.float64)
    if rows.ndim != 2:
        raise ValidationError("data must be a 2-D matrix")
    n, d = rows.shape
    if n < 3:
        raise ValidationError(f"PCA needs at least 3 rows, got {n}")
    if d < 2:
        raise ValidationError(f"PCA to 2 components needs at least 2 columns, got {d}")
    if not np.isfinite(rows).all():
        raise ValidationError("data contains non-finite values")
    if labels is not None and len(labels) != n:
        raise ValidationError("label vector length must match row count")

    if np.all(rows == rows[0]):
        raise DegenerateDataError("all rows are identical; no principal directions exist")
    centered = rows - rows.mean(axis=0)

    cov = (centered.T @ centered) / (n - 1)
    rng = SplitMix64(_START_SEED)

    lam1, v1 = _dominant_eigenpair(cov, [], rng)
    deflated = cov - lam1 * np.outer(v1, v1)
    lam2, v2 = _dominant_eigenpair(deflated, [v1], rng)

    pairs = sorted([(lam1, v1), (lam2, v2)], key=lambda p: -p[0])
    components = []
    for lam, vec in pairs:
        peak = int(np.argmax(np.abs(vec)))
        components.append(-vec if vec[peak] < 0 else vec)
    coords = centered @ np.column_stack(components)
    return Projection2D(
        coords=coords,
        labels=labels,
        explained_variance=(pairs[0][0], pairs[1][0]),
    )


def export_scatter(proj: Projection2D, author_names: list[str], path: str | Path) -> None:
    """CSV of plot-ready points: x,y,author_index,author_name per row."""
    if proj.labels is None:
        raise ValidationError("projection carries no labels; cannot export a scatter")
    labels = np.asarray(proj.labels.labels, dtype=np.int64)
    if labels.shape[0] != proj.coords.shape[0]:
        raise ValidationError("label count does not match coordinate count")
    if labels.size and (labels.min() < 0 or labels.max() >= len(author_names)):
        raise ValidationError("labels reference authors outside the name list")

    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "y", "author_index", "author_name"])
            for (x, y), label in zip(proj.coords, labels):
                writer.writerow([repr(float(x)), repr(float(y)), int(label), author_names[label]])
    except OSError as exc:
        raise LoadError(f"cannot write scatter to {path}: {exc}") from exc
