"""PCA projection against a dense eigensolver oracle, plus scatter export."""

import csv

import numpy as np
import pytest

from stilus.corpus import Granularity, LabelVector
from stilus.errors import DegenerateDataError, ValidationError
from stilus.projection import Projection2D, export_scatter, pca2


def top2_eigenvalues(data: np.ndarray) -> tuple[float, float]:
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (len(data) - 1)
    eigenvalues = np.sort(np.linalg.eigvalsh(cov))[::-1]
    return float(eigenvalues[0]), float(eigenvalues[1])


class TestPca2:
    def test_axis_aligned_2d_data_is_reproduced(self):
        # uncorrelated columns with var(x) > var(y); components must be the
        # standard axes, positively oriented
        data = np.array([[4.0, 1.0], [-4.0, 1.0], [4.0, -1.0], [-4.0, -1.0]])
        proj = pca2(data)
        centered = data - data.mean(axis=0)
        np.testing.assert_allclose(proj.coords, centered, atol=1e-8)

    def test_collinear_points_have_zero_second_variance(self):
        t = np.linspace(-3, 3, 9)
        direction = np.array([1.0, 2.0, -1.0, 0.5, 3.0, 1.5])
        data = np.outer(t, direction)
        proj = pca2(data)
        assert proj.explained_variance[1] == pytest.approx(0.0, abs=1e-8)
        assert np.allclose(proj.coords[:, 1], 0.0, atol=1e-6)

    def test_explained_variance_matches_eigensolver(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            n = int(rng.integers(4, 13))
            d = int(rng.integers(2, 9))
            data = rng.normal(size=(n, d))
            proj = pca2(data)
            lam1, lam2 = top2_eigenvalues(data)
            assert proj.explained_variance[0] == pytest.approx(lam1, abs=1e-6)
            assert proj.explained_variance[1] == pytest.approx(lam2, abs=1e-6)

    def test_translation_invariance(self):
        rng = np.random.default_rng(1)
        data = rng.normal(size=(10, 5))
        shifted = data + rng.normal(size=5) * 100.0
        np.testing.assert_allclose(pca2(data).coords, pca2(shifted).coords, atol=1e-8)

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        data = rng.normal(size=(12, 6))
        assert np.array_equal(pca2(data).coords, pca2(data).coords)

    def test_variance_ordering_and_budget(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            data = rng.normal(size=(15, 7))
            proj = pca2(data)
            lam1, lam2 = proj.explained_variance
            assert lam1 >= lam2 >= 0.0
            total = np.trace(np.cov(data, rowvar=False))
            assert lam1 + lam2 <= total + 1e-9

    def test_too_few_rows(self):
        with pytest.raises(ValidationError):
            pca2(np.zeros((2, 4)))

    def test_too_few_columns(self):
        with pytest.raises(ValidationError):
            pca2(np.zeros((5, 1)))

    def test_identical_rows_are_degenerate(self):
        with pytest.raises(DegenerateDataError):
            pca2(np.tile([[1.0, 2.0, 3.0]], (5, 1)))


class TestExportScatter:
    def proj(self, n=3):
        rng = np.random.default_rng(4)
        coords = rng.normal(size=(n, 2))
        labels = LabelVector(
            labels=np.array([i % 2 for i in range(n)]), granularity=Granularity.SENTENCE
        )
        return Projection2D(coords=coords, labels=labels, explained_variance=(1.0, 0.5))

    def test_rows_and_header(self, tmp_path):
        path = tmp_path / "scatter.csv"
        export_scatter(self.proj(3), ["alpha", "beta"], path)
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "y", "author_index", "author_name"]
        assert len(rows) == 4
        assert rows[1][3] == "alpha"
        assert rows[2][3] == "beta"

    def test_empty_projection_writes_header_only(self, tmp_path):
        proj = Projection2D(
            coords=np.zeros((0, 2)),
            labels=LabelVector(labels=np.array([], dtype=np.int64), granularity=Granularity.SENTENCE),
            explained_variance=(0.0, 0.0),
        )
        path = tmp_path / "empty.csv"
        export_scatter(proj, [], path)
        assert path.read_text().strip() == "x,y,author_index,author_name"

    def test_coordinates_round_trip_at_double_precision(self, tmp_path):
        proj = self.proj(5)
        path = tmp_path / "scatter.csv"
        export_scatter(proj, ["alpha", "beta"], path)
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        back = np.array([[float(r[0]), float(r[1])] for r in rows])
        assert np.array_equal(back, proj.coords)

    def test_missing_labels_rejected(self, tmp_path):
        proj = Projection2D(coords=np.zeros((2, 2)), labels=None, explained_variance=(0, 0))
        with pytest.raises(ValidationError):
            export_scatter(proj, ["a"], tmp_path / "x.csv")

    def test_out_of_range_labels_rejected(self, tmp_path):
        proj = self.proj(4)
        with pytest.raises(ValidationError):
            export_scatter(proj, ["only-one"], tmp_path / "x.csv")
