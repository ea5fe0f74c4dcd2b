import numpy as np
import pytest

from engage_miner.clustering import (
    FeatureMatrix,
    assign_levels,
    kmeans,
    label_levels,
    matrix_from_metrics,
    normalize,
)
from engage_miner.errors import InsufficientDataError, LevelMappingError
from engage_miner.etl import EngagementMetrics


def _blobs(rng, centers, per_cluster=20, sigma=0.01, dims=9):
    rows, truth = [], []
    for label, c in enumerate(centers):
        rows.append(rng.normal(c, sigma, size=(per_cluster, dims)))
        truth.extend([label] * per_cluster)
    x = np.vstack(rows)
    ids = tuple(f"s{i:03d}" for i in range(len(x)))
    return FeatureMatrix(rows=x, row_ids=ids), np.array(truth)


class TestNormalize:
    def test_scales_to_unit_interval(self):
        fm = FeatureMatrix(np.array([[0.0], [5.0], [10.0]]), ("a", "b", "c"))
        got = normalize(fm)
        assert got.rows[:, 0].tolist() == [0.0, 0.5, 1.0]
        assert got.scaling == ((0.0, 10.0),)

    def test_constant_column_maps_to_zero(self):
        fm = FeatureMatrix(np.array([[7.0], [7.0]]), ("a", "b"))
        assert normalize(fm).rows[:, 0].tolist() == [0.0, 0.0]

    def test_already_unit_unchanged(self):
        fm = FeatureMatrix(np.array([[0.0], [1.0]]), ("a", "b"))
        assert normalize(fm).rows[:, 0].tolist() == [0.0, 1.0]


class TestMatrixFromMetrics:
    def test_missing_durations_imputed_with_column_max(self):
        met = dict(
            num_logins=1, num_content_reads=1, num_forum_reads=1,
            num_forum_posts=1, num_quiz_reviews=1,
            assign2_dur_h=2.0, assign3_dur_h=3.0, avg_assign_dur_h=2.5,
        )
        metrics = {
            "s1": EngagementMetrics(assign1_dur_h=9.0, **met),
            "s2": EngagementMetrics(assign1_dur_h=None, **met),
        }
        fm = matrix_from_metrics(metrics)
        assert fm.rows[1][5] == 9.0  # imputed with observed max

    def test_rows_sorted_by_student(self):
        met = EngagementMetrics(1, 1, 1, 1, 1, 1.0, 1.0, 1.0, 1.0)
        fm = matrix_from_metrics({"s2": met, "s1": met})
        assert fm.row_ids == ("s1", "s2")


class TestKMeans:
    def test_recovers_planted_blobs(self):
        rng = np.random.default_rng(1)
        fm, truth = _blobs(rng, [0.1, 0.5, 0.9])
        result = kmeans(fm, k=3, seed=5)
        # same partition up to relabeling
        mapping = {}
        for got, want in zip(result.assignments, truth):
            mapping.setdefault(int(got), want)
            assert mapping[int(got)] == want

    def test_k1_centroid_is_mean(self):
        rng = np.random.default_rng(2)
        fm, _ = _blobs(rng, [0.4], per_cluster=10)
        result = kmeans(fm, k=1, seed=0)
        assert np.allclose(result.centroids[0], fm.rows.mean(axis=0))

    def test_too_few_rows(self):
        fm = FeatureMatrix(np.zeros((2, 9)), ("a", "b"))
        with pytest.raises(InsufficientDataError):
            kmeans(fm, k=3)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(3)
        fm, _ = _blobs(rng, [0.2, 0.8], per_cluster=15)
        a = kmeans(fm, k=2, seed=11)
        b = kmeans(fm, k=2, seed=11)
        assert np.array_equal(a.assignments, b.assignments)
        assert a.centroids.tobytes() == b.centroids.tobytes()

    def test_inertia_non_increasing(self):
        rng = np.random.default_rng(4)
        fm, _ = _blobs(rng, [0.1, 0.5, 0.9], sigma=0.2)  # overlapping: many iters
        result = kmeans(fm, k=3, seed=1)
        h = result.inertia_history
        assert all(h[i + 1] <= h[i] + 1e-9 for i in range(len(h) - 1))


class TestLabelLevels:
    def test_orders_by_count_means(self):
        centroids = np.array(
            [[0.5] * 5 + [0.5] * 4, [0.1] * 5 + [0.9] * 4, [0.9] * 5 + [0.1] * 4]
        )
        labels = label_levels(centroids, np.array([0, 1, 2]))
        assert labels == ["M", "L", "H"]

    def test_duration_dims_excluded_from_ordering(self):
        # high counts + high durations must still be H
        centroids = np.array(
            [[0.9] * 5 + [0.9] * 4, [0.5] * 5 + [0.0] * 4, [0.1] * 5 + [0.5] * 4]
        )
        assert label_levels(centroids, np.array([0, 1, 2])) == ["H", "M", "L"]

    def test_tie_broken_by_num_logins(self):
        low = [0.0] * 5 + [0.0] * 4
        tied_a = [0.4, 0.6, 0.5, 0.5, 0.5] + [0.0] * 4  # mean 0.5, logins 0.4
        tied_b = [0.6, 0.4, 0.5, 0.5, 0.5] + [0.0] * 4  # mean 0.5, logins 0.6
        labels = label_levels(np.array([tied_b, tied_a, low]), np.array([0, 1, 2]))
        assert labels == ["H", "M", "L"]

    def test_permutation_invariance(self):
        rng = np.random.default_rng(6)
        fm, _ = _blobs(rng, [0.1, 0.5, 0.9])
        result = kmeans(fm, k=3, seed=0)
        base = label_levels(result.centroids, result.assignments)
        perm = np.array([2, 0, 1])
        inverse = np.argsort(perm)
        permuted_centroids = result.centroids[perm]
        remapped = inverse[result.assignments]
        assert label_levels(permuted_centroids, remapped) == base

    def test_requires_three_clusters(self):
        with pytest.raises(LevelMappingError):
            label_levels(np.zeros((2, 9)), np.array([0, 1]))


class TestAssignLevels:
    def test_planted_cohort_gets_expected_levels(self):
        rng = np.random.default_rng(7)
        metrics = {}
        for i in range(30):
            base = [430.0, 700.0, 45.0, 8.0, 8.0] if i < 10 else (
                [180.0, 300.0, 20.0, 3.0, 3.0] if i < 20 else [20.0, 40.0, 2.0, 0.0, 0.0]
            )
            jitter = rng.normal(0, 0.5, 9)
            vals = np.array(base + [30.0, 40.0, 50.0, 40.0]) + jitter
            metrics[f"s{i:03d}"] = EngagementMetrics(
                *[int(max(v, 0)) for v in vals[:5]], *[float(max(v, 0)) for v in vals[5:]]
            )
        levels, result, _ = assign_levels(metrics, seed=3)
        for i in range(30):
            expected = "H" if i < 10 else ("M" if i < 20 else "L")
            assert levels[f"s{i:03d}"] == expected
