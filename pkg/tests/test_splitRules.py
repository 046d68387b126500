import numpy as np
import pytest

import constants as const
from dataSets import PlantedParams, VectorDataset, gen_planted, normalize_rows
from hctErrors import DatasetError, ModeError
from SimilarityView import SimilarityView
from spectralTools import PowerConfig, band_limits
from splitRules import (BuildConfig, _nearest_band_split, flat_kmeans, kmeans_plusplus, lloyd, project,
                        split_2means, split_aev, split_ev, split_node, split_rp, two_means_hyperplane)
from treeMetrics import purity

PLANTED_MISCLUSTER_LIMIT = 50


def _view(points, unit=False):
    return SimilarityView.implicit(VectorDataset(points=np.asarray(points, dtype=float), unit_normalized=unit))


def _covers(plan, m):
    np.testing.assert_array_equal(np.sort(np.concatenate([plan.left_ids, plan.right_ids])), np.arange(m))


def _misclustered(plan, labels):
    """Points on the wrong side under the better of the two ways to match sides to blocks."""
    on_left = np.isin(np.arange(labels.size), plan.left_ids)
    wrong = int(np.sum(on_left != (labels == 0)))
    return min(wrong, labels.size - wrong)


class TestBuildConfig:
    def test_flag_spelling(self):
        assert BuildConfig.from_flag("2means").rule == const.RULE_TWO_MEANS
        assert BuildConfig.from_flag("aev").rule == const.RULE_AEV

    def test_unknown_rule(self):
        with pytest.raises(ModeError):
            BuildConfig(rule="KD")
        with pytest.raises(ModeError):
            BuildConfig.from_flag("kd")

    def test_leaf_max_and_bucket_bounds(self):
        with pytest.raises(ValueError):
            BuildConfig(leaf_max=0)
        with pytest.raises(ValueError):
            BuildConfig(knn_bucket=0)

    def test_dict_form(self):
        config = BuildConfig(rule=const.RULE_RP, balance_enforced=False, leaf_max=4,
                             power=PowerConfig(epsilon=0.05, seed=9), seed=9, rp_zero_threshold=True)
        assert BuildConfig.from_dict(config.as_dict()) == config

    def test_band(self):
        assert BuildConfig().band == const.BALANCE_BAND
        assert BuildConfig(balance_enforced=False).band == const.FULL_BAND


class TestProject:
    def test_plain_and_degree_normalized(self):
        points = np.array([[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(project(points, np.array([2.0, 3.0])), [2.0, 3.0])
        np.testing.assert_allclose(project(points, np.array([2.0, 3.0]), np.array([4.0, 9.0])), [1.0, 1.0])

    def test_single_point(self):
        assert project(np.array([1.0, 1.0]), np.array([1.0, -1.0])).shape == (1,)


class TestRandomPartition:
    def test_median_split(self, gmm_small):
        view = SimilarityView.implicit(gmm_small.subset(np.arange(25)))
        plan = split_rp(view, BuildConfig(rule=const.RULE_RP), seed=4)
        assert plan.left_ids.size == 13
        _covers(plan, 25)
        coordinates = project(view.rows, plan.direction)
        assert coordinates[plan.left_ids].max() <= plan.threshold < coordinates[plan.right_ids].min()
        assert np.linalg.norm(plan.direction) == pytest.approx(1.0)

    def test_seeded(self, gmm_small):
        view = SimilarityView.implicit(gmm_small)
        config = BuildConfig(rule=const.RULE_RP)
        np.testing.assert_array_equal(split_rp(view, config, 7).left_ids, split_rp(view, config, 7).left_ids)

    def test_zero_threshold(self):
        points = normalize_rows(np.array([[1.0, 2.0], [-1.0, -2.0], [3.0, -1.0], [-3.0, 1.0]]))
        plan = split_rp(_view(points, True), BuildConfig(rule=const.RULE_RP, rp_zero_threshold=True), seed=1)
        assert plan.threshold == 0.0
        assert plan.left_ids.size == 2

    def test_zero_threshold_falls_back_to_median(self):
        points = np.tile([0.6, 0.8], (4, 1))
        plan = split_rp(_view(points, True), BuildConfig(rule=const.RULE_RP, rp_zero_threshold=True), seed=1)
        np.testing.assert_array_equal(plan.left_ids, [0, 1])

    @pytest.mark.parametrize("seed", range(6))
    def test_median_inside_ties_moves_to_a_boundary(self, seed):
        points = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        plan = split_rp(_view(points, True), BuildConfig(rule=const.RULE_RP), seed=seed)
        assert plan.left_ids.size in (1, 3)
        coordinates = project(points, plan.direction)
        np.testing.assert_array_equal(np.flatnonzero(coordinates <= plan.threshold), np.sort(plan.left_ids))

    def test_needs_vectors(self, clique4):
        with pytest.raises(ModeError):
            split_rp(SimilarityView.explicit(clique4), BuildConfig(rule=const.RULE_RP), 0)


class TestSpectralRules:
    @pytest.mark.parametrize("rule, split", [(const.RULE_EV, split_ev), (const.RULE_AEV, split_aev)])
    def test_balanced_and_replayable(self, gmm_small, rule, split):
        view = SimilarityView.implicit(gmm_small)
        plan = split(view, BuildConfig(rule=rule), 3)
        first, last = band_limits(120, const.BALANCE_BAND)
        assert first <= plan.left_ids.size <= last
        assert plan.rule_tag == rule
        _covers(plan, 120)
        np.testing.assert_array_equal(plan.degree_vector, view.row_sum)
        coordinates = project(view.rows, plan.direction, plan.degree_vector)
        np.testing.assert_array_equal(np.flatnonzero(coordinates <= plan.threshold), plan.left_ids)

    def test_ev_keeps_whole_clusters_together(self, gmm_small):
        plan = split_ev(SimilarityView.implicit(gmm_small), BuildConfig(rule=const.RULE_EV))
        for label in range(3):
            members = np.flatnonzero(gmm_small.labels == label)
            inside = np.isin(members, plan.left_ids)
            assert inside.all() or not inside.any()

    @pytest.mark.parametrize("balance", [True, False])
    def test_ev_takes_the_best_prefix(self, positive_vectors, balance):
        view = SimilarityView.implicit(positive_vectors)
        config = BuildConfig(rule=const.RULE_EV, balance_enforced=balance)
        plan = split_ev(view, config)
        rows = positive_vectors.points
        degrees = rows @ rows.sum(axis=0)
        direction = np.linalg.svd(rows / np.sqrt(degrees)[:, None])[2][1]
        order = np.argsort(project(rows, direction, rows.sum(axis=0)), kind="stable")
        first, last = band_limits(view.m, config.band)
        best = min(view.conductance(order[:j]) for j in range(first, last + 1))
        assert plan.conductance == pytest.approx(best, rel=1e-9)
        assert view.conductance(plan.left_ids) == pytest.approx(best, rel=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_aev_recovers_planted_halves(self, seed):
        graph = gen_planted(PlantedParams(n=200, p=0.9, q=0.1, seed=seed))
        plan = split_aev(SimilarityView.explicit(graph), BuildConfig(), seed)
        assert _misclustered(plan, graph.labels) <= PLANTED_MISCLUSTER_LIMIT

    @pytest.mark.slow
    def test_aev_recovers_planted_halves_across_seeds(self):
        recovered = 0
        for seed in range(100):
            graph = gen_planted(PlantedParams(n=200, p=0.9, q=0.1, seed=seed))
            plan = split_aev(SimilarityView.explicit(graph), BuildConfig(), seed)
            recovered += _misclustered(plan, graph.labels) <= PLANTED_MISCLUSTER_LIMIT
        assert recovered >= 95

    def test_graph_sweep_on_two_triangles(self, two_triangles):
        plan = split_aev(SimilarityView.explicit(two_triangles), BuildConfig(), 0)
        assert plan.rule_tag == const.RULE_GRAPH_SWEEP
        assert not plan.has_hyperplane
        assert set(plan.left_ids.tolist()) in ({0, 1, 2}, {3, 4, 5})
        assert plan.conductance == pytest.approx(1 / 7)

    def test_one_dimensional_ev(self):
        view = _view(np.ones((4, 1)), True)
        plan = split_ev(view, BuildConfig(rule=const.RULE_EV))
        np.testing.assert_array_equal(plan.direction, [1.0])
        assert plan.left_ids.size == 2


class TestTwoMeans:
    def test_hyperplane(self):
        direction, threshold = two_means_hyperplane([1.0, 0.0], [-1.0, 0.0])
        np.testing.assert_array_equal(direction, [4.0, 0.0])
        assert threshold == 0.0

    def test_plusplus_picks_data_points(self, gmm_small):
        centers = kmeans_plusplus(gmm_small.points, 3, np.random.default_rng(0))
        for center in centers:
            assert (np.abs(gmm_small.points - center).sum(axis=1) == 0).any()

    def test_lloyd(self):
        points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
        centers, assignment = lloyd(points, points[[0, 2]])
        np.testing.assert_allclose(centers, [[0.0, 0.5], [10.0, 0.5]])
        np.testing.assert_array_equal(assignment, [0, 0, 1, 1])

    def test_separates_two_clumps(self):
        points = np.array([[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [5.0, 5.0], [5.1, 5.0], [5.0, 5.1]])
        plan = split_2means(_view(points), BuildConfig(rule=const.RULE_TWO_MEANS), seed=2)
        assert set(plan.left_ids.tolist()) in ({0, 1, 2}, {3, 4, 5})
        coordinates = project(points, plan.direction)
        np.testing.assert_array_equal(np.flatnonzero(coordinates <= plan.threshold), plan.left_ids)

    def test_out_of_band_split_is_moved(self):
        points = np.vstack([np.zeros((1, 2)), np.tile([5.0, 5.0], (5, 1)) + np.arange(5)[:, None] * 0.01])
        plan = split_2means(_view(points), BuildConfig(rule=const.RULE_TWO_MEANS), seed=0)
        first, last = band_limits(6, const.BALANCE_BAND)
        assert first <= plan.left_ids.size <= last
        unbalanced = split_2means(_view(points), BuildConfig(rule=const.RULE_TWO_MEANS, balance_enforced=False), 0)
        assert min(unbalanced.left_ids.size, unbalanced.right_ids.size) == 1

    def test_band_without_boundary_takes_nearest_one(self):
        coordinates = np.array([0.0, 1.0, 1.0, 1.0, 1.0, 1.0])
        left, threshold = _nearest_band_split(coordinates, const.BALANCE_BAND, 1)
        np.testing.assert_array_equal(left, [0])
        assert threshold == 0.0
        left, _ = _nearest_band_split(np.zeros(6), const.BALANCE_BAND, 1)
        assert left.size == 3

    def test_identical_points(self):
        plan = split_2means(_view(np.ones((5, 3))), BuildConfig(rule=const.RULE_TWO_MEANS), seed=0)
        np.testing.assert_array_equal(plan.left_ids, [0, 1, 2])
        np.testing.assert_array_equal(plan.direction, np.zeros(3))


class TestSplitNode:
    @pytest.mark.parametrize("rule", [const.RULE_RP, const.RULE_EV, const.RULE_TWO_MEANS])
    def test_vector_rules_reject_graphs(self, clique4, rule):
        with pytest.raises(ModeError):
            split_node(SimilarityView.explicit(clique4), BuildConfig(rule=rule), 0)

    def test_dispatch(self, gmm_small):
        plan = split_node(SimilarityView.implicit(gmm_small), BuildConfig(rule=const.RULE_RP), 0)
        assert plan.rule_tag == const.RULE_RP


class TestFlatKmeans:
    def test_recovers_separated_clusters(self, gmm_small):
        assignment, centers = flat_kmeans(gmm_small, 3, seed=0)
        assert centers.shape == (3, 8)
        assert purity(assignment, gmm_small.labels) == 1.0

    @pytest.mark.parametrize("k", [0, 121])
    def test_k_bounds(self, gmm_small, k):
        with pytest.raises(DatasetError):
            flat_kmeans(gmm_small, k)
