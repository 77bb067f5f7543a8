import itertools

import numpy as np
import pytest

from tsagg.cluster import (
    _lloyd,
    aggregate_averaging,
    aggregate_hierarchical,
    aggregate_kmeans,
    aggregate_kmedoids_exact,
    cluster_objective,
    medoid_of,
    pairwise_distances,
)


def brute_force_kmedoids(x, n_clusters):
    """All medoid subsets, lowest cost first, lexicographic tie-break."""
    d = pairwise_distances(x)
    best_cost, best_set = np.inf, None
    for combo in itertools.combinations(range(x.shape[0]), n_clusters):
        cost = d[list(combo)].min(axis=0).sum()
        if cost < best_cost - 1e-12:
            best_cost, best_set = cost, combo
    return best_cost, best_set


def check_partition(result, n_candidates):
    assert result.assignment.shape == (n_candidates,)
    assert sum(len(c) for c in result.clusters) == n_candidates
    assert result.weights.sum() == n_candidates
    assert np.all(result.weights >= 1)
    covered = np.sort(np.concatenate(result.clusters))
    assert np.array_equal(covered, np.arange(n_candidates))


class TestDistancesAndObjective:
    def test_two_unit_coordinates(self):
        d = pairwise_distances(np.array([[0.0, 0.0], [1.0, 1.0]]))
        assert d[0, 1] == pytest.approx(2.0)

    def test_zero_diagonal_and_symmetry(self):
        rng = np.random.default_rng(0)
        d = pairwise_distances(rng.random((12, 5)))
        assert np.all(np.diag(d) == 0.0)
        assert np.array_equal(d, d.T)
        assert d.min() >= 0.0

    def test_swapped_coordinates(self):
        d = pairwise_distances(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert d[0, 1] == pytest.approx(2.0)

    def test_objective_zero_when_candidates_equal_reps(self):
        x = np.array([[0.2], [0.8]])
        assert cluster_objective(x, [0, 1], x) == 0.0

    def test_objective_centroid(self):
        assert cluster_objective(np.array([[0.0], [2.0]]), [0, 0], np.array([[1.0]])) == pytest.approx(2.0)

    def test_objective_medoid_dominates_centroid(self):
        assert cluster_objective(np.array([[0.0], [2.0]]), [0, 0], np.array([[0.0]])) == pytest.approx(4.0)

    def test_objective_rejects_bad_assignment(self):
        with pytest.raises(ValueError, match="out of range"):
            cluster_objective(np.array([[0.0], [1.0]]), [0, 5], np.array([[0.0]]))


class TestMedoidOf:
    def test_singleton(self):
        assert medoid_of(np.array([[0.0]]), [0]) == 0

    def test_three_points(self):
        # summed squared distances: 13, 5, 10
        assert medoid_of(np.array([[0.0], [2.0], [3.0]]), [0, 1, 2]) == 1

    def test_symmetric_tie_takes_lowest_index(self):
        assert medoid_of(np.array([[0.0], [4.0]]), [0, 1]) == 0

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            medoid_of(np.array([[0.0]]), [])


class TestAveraging:
    def test_remainder_goes_to_last_cluster(self):
        result = aggregate_averaging(np.arange(5.0)[:, None], 2)
        assert [c.tolist() for c in result.clusters] == [[0, 1], [2, 3, 4]]

    def test_singleton_clusters_have_zero_objective(self):
        x = np.random.default_rng(1).random((6, 4))
        result = aggregate_averaging(x, 6)
        assert result.objective == pytest.approx(0.0, abs=1e-15)
        assert np.allclose(result.representatives, x)

    def test_blockwise_means(self):
        # clusters {0,2} and {4,6}: means 1 and 5, squared error 1+1+1+1
        result = aggregate_averaging(np.array([[0.0], [2.0], [4.0], [6.0]]), 2)
        assert np.allclose(result.representatives.ravel(), [1.0, 5.0])
        oracle = sum((v - m) ** 2 for v, m in [(0, 1), (2, 1), (4, 5), (6, 5)])
        assert result.objective == pytest.approx(oracle)

    def test_chronological_kind_and_partition(self):
        x = np.random.default_rng(2).random((17, 3))
        result = aggregate_averaging(x, 4)
        assert result.representative_kind == "chronological_mean"
        check_partition(result, 17)

    def test_too_many_clusters_rejected(self):
        with pytest.raises(ValueError):
            aggregate_averaging(np.zeros((3, 1)), 4)


class TestKMeans:
    def test_two_well_separated_pairs(self):
        x = np.array([[0.0], [1.0], [10.0], [11.0]])
        result = aggregate_kmeans(x, 2, seed=0)
        # oracle: enumerate every 2-partition
        best = min(
            cluster_objective(x, assign, np.array([
                x[np.array(assign) == k].mean(axis=0) for k in range(2)]))
            for assign in itertools.product([0, 1], repeat=4)
            if len(set(assign)) == 2)
        assert result.objective == pytest.approx(best)
        assert result.objective == pytest.approx(1.0)

    def test_one_cluster_is_column_mean(self):
        x = np.random.default_rng(3).random((9, 4))
        result = aggregate_kmeans(x, 1, seed=1)
        assert np.allclose(result.representatives[0], x.mean(axis=0))

    def test_as_many_clusters_as_candidates(self):
        x = np.random.default_rng(4).random((7, 2))
        result = aggregate_kmeans(x, 7, seed=0)
        assert result.objective == pytest.approx(0.0, abs=1e-12)

    def test_deterministic_for_fixed_seed(self):
        x = np.random.default_rng(5).random((40, 6))
        a = aggregate_kmeans(x, 5, seed=42)
        b = aggregate_kmeans(x, 5, seed=42)
        assert np.array_equal(a.assignment, b.assignment)
        assert a.objective == b.objective

    def test_objective_monotone_within_one_run(self):
        rng = np.random.default_rng(6)
        x = rng.random((50, 8))
        from tsagg.cluster import _seed_centers
        centers = _seed_centers(x, 6, rng)
        _, _, _, history = _lloyd(x, centers, max_iter=300, tol=0.0)
        assert all(a >= b - 1e-12 for a, b in zip(history, history[1:]))

    def test_partition_invariant(self):
        x = np.random.default_rng(7).random((33, 5))
        check_partition(aggregate_kmeans(x, 6, seed=9), 33)


class TestKMedoidsExact:
    def test_tie_broken_to_lower_index(self):
        result = aggregate_kmedoids_exact(np.array([[0.0], [1.0], [10.0]]), 2)
        assert result.objective == pytest.approx(1.0)
        assert sorted(result.representatives.ravel().tolist()) == [0.0, 10.0]

    def test_every_candidate_its_own_medoid(self):
        x = np.random.default_rng(8).random((6, 3))
        result = aggregate_kmedoids_exact(x, 6)
        assert result.objective == pytest.approx(0.0, abs=1e-9)

    def test_single_cluster_medoid(self):
        result = aggregate_kmedoids_exact(np.array([[0.0], [2.0], [3.0]]), 1)
        assert result.representatives[0, 0] == pytest.approx(2.0)
        assert result.objective == pytest.approx(5.0)

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(9)
        for _ in range(8):
            n = int(rng.integers(4, 9))
            k = int(rng.integers(1, 4))
            x = rng.random((n, 3))
            result = aggregate_kmedoids_exact(x, k)
            cost, combo = brute_force_kmedoids(x, k)
            assert result.objective == pytest.approx(cost, abs=1e-9)
            chosen = {int(np.flatnonzero((x == rep).all(axis=1))[0])
                      for rep in result.representatives}
            assert chosen == set(combo)

    def test_representatives_are_candidate_rows(self):
        x = np.random.default_rng(10).random((12, 4))
        result = aggregate_kmedoids_exact(x, 3)
        assert result.representative_kind == "medoid"
        for rep in result.representatives:
            assert any(np.array_equal(rep, row) for row in x)
        check_partition(result, 12)

    def test_duplicate_candidate_rows_keep_every_cluster_occupied(self):
        # identical rows chosen as separate medoids must each keep themselves
        x = np.array([[0.2, 0.2], [0.8, 0.1], [0.2, 0.2], [0.9, 0.9]])
        result = aggregate_kmedoids_exact(x, 4)
        check_partition(result, 4)
        assert result.objective == pytest.approx(0.0, abs=1e-12)


class TestHierarchical:
    def test_three_point_example(self):
        result = aggregate_hierarchical(np.array([[0.0], [1.0], [10.0]]), 2)
        assert [c.tolist() for c in result.clusters] == [[0, 1], [2]]
        assert result.representatives[0, 0] == 0.0  # tie toward lowest index

    def test_no_merges_when_k_equals_n(self):
        x = np.random.default_rng(11).random((5, 2))
        result = aggregate_hierarchical(x, 5)
        assert result.objective == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(result.representatives, x)

    def test_nearest_pairs_merge_first(self):
        result = aggregate_hierarchical(np.array([[0.0], [1.0], [4.0], [5.0]]), 2)
        assert [c.tolist() for c in result.clusters] == [[0, 1], [2, 3]]

    def test_deterministic_across_runs(self):
        x = np.random.default_rng(12).random((30, 4))
        a = aggregate_hierarchical(x, 4)
        b = aggregate_hierarchical(x, 4)
        assert np.array_equal(a.assignment, b.assignment)

    def test_medoid_representatives_and_partition(self):
        x = np.random.default_rng(13).random((25, 6))
        result = aggregate_hierarchical(x, 5)
        check_partition(result, 25)
        for k, members in enumerate(result.clusters):
            assert np.array_equal(result.representatives[k], x[medoid_of(x, members)])


class TestCentroidDominance:
    def test_medoid_substitution_never_improves(self):
        rng = np.random.default_rng(14)
        for _ in range(5):
            x = rng.random((20, 5))
            result = aggregate_kmeans(x, 4, seed=0)
            medoid_reps = np.vstack([
                x[medoid_of(x, members)] for members in result.clusters])
            medoid_obj = cluster_objective(x, result.assignment, medoid_reps)
            assert medoid_obj >= result.objective - 1e-9
