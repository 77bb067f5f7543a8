import numpy as np
import pytest

from tsagg.cluster import (
    ClusterResult,
    aggregate_averaging,
    aggregate_hierarchical,
    aggregate_kmeans,
)
from tsagg.preprocess import RawSeriesSet, normalize, reshape_to_periods
from tsagg.rescale import (
    backscale,
    build_typical_period_set,
    reconstruct_full,
    rescale_to_mean,
)


def matrix_from(values, steps_per_period, names=None):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    names = names or tuple(f"a{i}" for i in range(values.shape[1]))
    raw = RawSeriesSet(names=tuple(names), units=("",) * values.shape[1], values=values)
    scaled, info = normalize(raw)
    return reshape_to_periods(scaled, raw.names, info, steps_per_period)


def single_cluster_result(matrix, representative):
    representative = np.asarray(representative, dtype=float)[None, :]
    n = matrix.n_periods
    return ClusterResult(
        method="kmeans",
        assignment=np.zeros(n, dtype=int),
        clusters=(np.arange(n),),
        representatives=representative,
        representative_kind="centroid",
        weights=np.array([n]),
        objective=0.0,
    )


class TestRescaleToMean:
    def test_matching_mean_is_untouched(self):
        mat = matrix_from([0.0, 1.0, 0.0, 1.0], 2)
        result = aggregate_averaging(mat, 2)
        scaled, report = rescale_to_mean(result, mat)
        assert np.allclose(scaled, result.representatives)
        assert not report["residuals"]

    def test_factor_two_without_clipping(self):
        # original mean 0.5 per step, representative [0.25, 0.25]
        mat = matrix_from([0.0, 1.0, 1.0, 0.0], 2)
        result = single_cluster_result(mat, [0.25, 0.25])
        scaled, _ = rescale_to_mean(result, mat)
        assert np.allclose(scaled, [[0.5, 0.5]])

    def test_clipping_engages_and_mean_recovers(self):
        # single period with mean 0.9, representative [0.6, 1.0]: the upper value
        # clips at 1 and the lower one is re-scaled to 0.8 so the mean is back.
        from tsagg.preprocess import CandidateMatrix, NormalizationInfo
        info = NormalizationInfo(("a0",), np.array([0.0]), np.array([1.0]))
        mat = CandidateMatrix(values=np.array([[0.8, 1.0]]), steps_per_period=2,
                              attribute_order=("a0",), norm_info=info)
        result = single_cluster_result(mat, [0.6, 1.0])
        scaled, report = rescale_to_mean(result, mat)
        assert np.allclose(scaled, [[0.8, 1.0]])
        assert not report["residuals"]

    def test_never_exceeds_one(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            mat = matrix_from(rng.random(48) ** 3, 4)
            result = aggregate_kmeans(mat, 3, seed=1)
            scaled, _ = rescale_to_mean(result, mat)
            assert scaled.max() <= 1.0 + 1e-12

    def test_weighted_mean_matches_original(self):
        rng = np.random.default_rng(1)
        mat = matrix_from(rng.random((120, 2)), 6, names=("u", "v"))
        result = aggregate_hierarchical(mat, 4)
        scaled, _ = rescale_to_mean(result, mat)
        g = mat.steps_per_period
        for a in range(2):
            cols = slice(a * g, (a + 1) * g)
            target = mat.values[:, cols].sum()
            got = result.weights @ scaled[:, cols].sum(axis=1)
            assert got == pytest.approx(target, rel=1e-9)

    def test_all_zero_aggregation_reported(self):
        info_mat = matrix_from([0.0, 1.0, 0.5, 0.7], 2)
        result = single_cluster_result(info_mat, [0.0, 0.0])
        scaled, report = rescale_to_mean(result, info_mat)
        assert "a0" in report["unscaled_attributes"]
        assert np.allclose(scaled, 0.0)


class TestBackscale:
    def test_bounds_map_to_min_max(self):
        from tsagg.preprocess import NormalizationInfo
        info = NormalizationInfo(("a0",), np.array([10.0]), np.array([30.0]))
        assert backscale(np.array([[0.0]]), info, 1)[0, 0] == pytest.approx(10.0)
        assert backscale(np.array([[1.0]]), info, 1)[0, 0] == pytest.approx(30.0)
        assert backscale(np.array([[0.5]]), info, 1)[0, 0] == pytest.approx(20.0)

    def test_degenerate_restores_constant(self):
        mat = matrix_from(np.c_[np.full(6, 7.5), np.arange(6.0)], 2, names=("const", "ramp"))
        result = aggregate_averaging(mat, 1)
        tps = build_typical_period_set(result, mat)
        const_block = tps.representatives_physical[:, :2]
        assert np.allclose(const_block, 7.5)


class TestReconstruct:
    def test_direct_substitution(self):
        mat = matrix_from([0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 2)
        result = aggregate_averaging(mat, 2)  # blocks {0} and {1, 2}
        assert result.assignment.tolist() == [0, 1, 1]
        tps = build_typical_period_set(result, mat)
        recon = reconstruct_full(tps, scale="normalized")
        assert recon.shape == (6, 1)
        assert np.allclose(recon[2:4, 0], recon[4:6, 0])

    def test_singleton_medoids_reproduce_original(self):
        rng = np.random.default_rng(2)
        raw_values = rng.random((40, 2)) * 50.0 - 10.0
        raw = RawSeriesSet(names=("u", "v"), units=("", ""), values=raw_values)
        scaled, info = normalize(raw)
        mat = reshape_to_periods(scaled, raw.names, info, 8)
        result = aggregate_hierarchical(mat, mat.n_periods)
        tps = build_typical_period_set(result, mat)
        recon = reconstruct_full(tps, scale="physical")
        assert np.allclose(recon, raw_values, atol=1e-9)

    def test_weighted_mean_identity(self):
        rng = np.random.default_rng(3)
        mat = matrix_from(rng.random(60), 4)
        result = aggregate_kmeans(mat, 3, seed=2)
        tps = build_typical_period_set(result, mat)
        recon = reconstruct_full(tps, scale="physical")
        g = tps.steps_per_period
        weighted = sum(
            w * tps.representatives_physical[k, :g].mean()
            for k, w in enumerate(tps.weights)) / tps.n_periods
        assert recon[:, 0].mean() == pytest.approx(weighted, rel=1e-12)

    def test_mean_preserved_after_full_pipeline(self):
        rng = np.random.default_rng(4)
        values = rng.random((96, 3)) * np.array([5.0, 100.0, 0.01])
        raw = RawSeriesSet(names=("a", "b", "c"), units=("", "", ""), values=values)
        scaled, info = normalize(raw)
        mat = reshape_to_periods(scaled, raw.names, info, 12)
        for agg in (aggregate_averaging, aggregate_hierarchical):
            tps = build_typical_period_set(agg(mat, 3), mat)
            recon = reconstruct_full(tps, scale="physical")
            for col in range(3):
                rel = abs(recon[:, col].mean() - values[:, col].mean())
                rel /= max(abs(values[:, col].mean()), 1e-12)
                assert rel < 1e-6

    def test_range_preserved(self):
        rng = np.random.default_rng(5)
        values = rng.random(80) * 40.0 + 5.0
        raw = RawSeriesSet(names=("a",), units=("",), values=values[:, None])
        scaled, info = normalize(raw)
        mat = reshape_to_periods(scaled, raw.names, info, 8)
        tps = build_typical_period_set(aggregate_kmeans(mat, 3, seed=3), mat)
        recon = reconstruct_full(tps, scale="physical")
        assert recon.min() >= values.min() - 1e-9
        assert recon.max() <= values.max() + 1e-9

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(6)
        mat = matrix_from(rng.random(64), 4)
        result = aggregate_hierarchical(mat, 4)
        perm = np.array([2, 0, 3, 1])  # shuffled cluster k is original cluster perm[k]
        inverse = np.argsort(perm)
        shuffled = ClusterResult(
            method=result.method,
            assignment=inverse[result.assignment],
            clusters=tuple(result.clusters[p] for p in perm),
            representatives=result.representatives[perm],
            representative_kind=result.representative_kind,
            weights=result.weights[perm],
            objective=result.objective,
        )
        a, _ = rescale_to_mean(result, mat)
        b, _ = rescale_to_mean(shuffled, mat)
        assert np.allclose(a, b[inverse])
