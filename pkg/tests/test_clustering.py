import numpy as np
import pytest

from netatlas.clustering import cluster
from netatlas.errors import TooFewSubjectsError

from reference import kmeans_best_inertia


def blobs(seed, centers, per_center, spread=0.05):
    rng = np.random.default_rng(seed)
    rows = []
    for c in centers:
        rows.append(np.asarray(c) + spread * rng.standard_normal((per_center, len(c))))
    return np.vstack(rows)


class TestCluster:
    def test_deterministic(self):
        x = blobs(0, [(0, 0), (5, 5), (-5, 5)], 7)
        a = cluster(x, 3, seed=42)
        b = cluster(x, 3, seed=42)
        assert np.array_equal(a.labels, b.labels)
        assert a.inertia == b.inertia

    def test_labels_in_range_and_all_clusters_used(self):
        x = blobs(1, [(0, 0), (4, 4)], 10)
        out = cluster(x, 4, seed=0)
        assert out.labels.shape == (20,)
        assert set(out.labels) == {0, 1, 2, 3}

    def test_separated_blobs_recovered_exactly(self):
        x = blobs(2, [(0, 0), (10, 0), (0, 10)], 5)
        out = cluster(x, 3, seed=0)
        groups = [frozenset(np.flatnonzero(out.labels == j)) for j in range(3)]
        want = [frozenset(range(0, 5)), frozenset(range(5, 10)), frozenset(range(10, 15))]
        assert sorted(groups, key=min) == want

    def test_reaches_global_optimum_on_tiny_input(self):
        rng = np.random.default_rng(3)
        x = blobs(3, [(0, 0), (3, 3)], 3, spread=0.5) + 0.1 * rng.standard_normal((6, 2))
        out = cluster(x, 2, seed=0)
        assert out.inertia == pytest.approx(kmeans_best_inertia(x, 2), rel=1e-9)

    def test_inertia_never_beats_exhaustive_search(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            x = rng.random((7, 3))
            out = cluster(x, 3, seed=seed)
            assert out.inertia >= kmeans_best_inertia(x, 3) - 1e-9

    def test_inertia_matches_final_assignment(self):
        x = blobs(4, [(0, 0), (6, 1)], 8)
        out = cluster(x, 2, seed=1)
        total = 0.0
        for j in range(2):
            members = x[out.labels == j]
            total += ((members - members.mean(axis=0)) ** 2).sum()
        assert out.inertia == pytest.approx(total, rel=1e-12)

    def test_single_cluster(self):
        x = blobs(5, [(1, 1)], 6)
        out = cluster(x, 1, seed=0)
        assert (out.labels == 0).all()

    def test_n_equals_k_gives_zero_inertia(self):
        rng = np.random.default_rng(6)
        x = rng.random((4, 2))
        out = cluster(x, 4, seed=0)
        assert sorted(out.labels) == [0, 1, 2, 3]
        assert out.inertia == pytest.approx(0.0, abs=1e-18)

    def test_seeding_survives_uniform_rescaling(self):
        x = blobs(7, [(0, 0), (2, 2), (5, 0)], 6)
        a = cluster(x, 3, seed=9)
        b = cluster(3.7 * x, 3, seed=9)
        assert np.array_equal(a.labels, b.labels)

    def test_too_few_subjects(self):
        with pytest.raises(TooFewSubjectsError):
            cluster(np.zeros((2, 3)), 3, seed=0)

    def test_bad_arguments(self):
        with pytest.raises(ValueError, match="n_c"):
            cluster(np.zeros((3, 2)), 0, seed=0)
        with pytest.raises(ValueError, match="2-D"):
            cluster(np.zeros(5), 1, seed=0)
