import itertools

import numpy as np
import pytest

import constants as const
from conftest import random_graph
from dataSets import ExplicitGraph, VectorDataset, normalize_rows
from hctErrors import EigenSolverError, ModeError, SimilarityError, SweepError
from SimilarityView import SimilarityView
from spectralTools import (PowerConfig, band_limits, exact_second_right_singular, exhaustive_min_conductance,
                           jacobi_eigh, nearest_separating_prefix, normalized_spectrum, rayleigh_quotient,
                           second_eigenvector_deflated, sweep_cut, top_eigenvector)


def _graph(edges, n):
    weights = np.zeros((n, n))
    for i, j in edges:
        weights[i, j] = weights[j, i] = 1.0
    return ExplicitGraph(weights=weights)


PATH4 = _graph([(0, 1), (1, 2), (2, 3)], 4)
TWO_PAIRS = _graph([(0, 1), (2, 3)], 4)


class TestPowerConfig:
    def test_iteration_count(self):
        assert PowerConfig().iterations(100) == 185
        assert PowerConfig(iteration_count=7).iterations(100) == 7
        assert PowerConfig().iterations(1) == 1

    @pytest.mark.parametrize("kwargs", [{"epsilon": 0.0}, {"power_constant": -1.0}, {"iteration_count": 0}])
    def test_rejects_bad_settings(self, kwargs):
        with pytest.raises(ValueError):
            PowerConfig(**kwargs)


class TestTopEigenvector:
    def test_single_edge(self):
        view = SimilarityView.explicit(_graph([(0, 1)], 2))
        np.testing.assert_allclose(top_eigenvector(view, PowerConfig()), [2 ** -0.5, 2 ** -0.5], atol=1e-12)

    def test_clique_is_uniform(self, clique4):
        view = SimilarityView.explicit(clique4)
        vector = top_eigenvector(view, PowerConfig(seed=5))
        np.testing.assert_allclose(vector, 0.5, atol=1e-9)
        assert rayleigh_quotient(view, vector) == pytest.approx(1.0)

    def test_proportional_to_root_degree(self, two_triangles):
        view = SimilarityView.explicit(two_triangles)
        vector = top_eigenvector(view, PowerConfig(epsilon=0.01))
        expected = np.sqrt(two_triangles.degree)
        np.testing.assert_allclose(vector, expected / np.linalg.norm(expected), atol=1e-6)

    def test_implicit_matches_dense_operator(self, positive_vectors):
        view = SimilarityView.implicit(positive_vectors)
        vector = top_eigenvector(view, PowerConfig(epsilon=0.01))
        dense = np.linalg.eigh(view.normalized_matrix())[1][:, -1]
        assert abs(vector @ dense) == pytest.approx(1.0, abs=1e-9)

    def test_seed_deterministic(self, positive_vectors):
        view = SimilarityView.implicit(positive_vectors)
        config = PowerConfig(seed=3, iteration_count=4)
        np.testing.assert_array_equal(top_eigenvector(view, config), top_eigenvector(view, config))


class TestSecondEigenvector:
    def test_separates_two_pairs(self):
        view = SimilarityView.explicit(TWO_PAIRS)
        first = np.full(4, 0.5)
        second = second_eigenvector_deflated(view, first, PowerConfig(epsilon=0.01))
        assert abs(second @ first) < 1e-6
        signs = np.sign(second)
        assert signs[0] == signs[1] != signs[2] == signs[3]

    def test_clique_multiplicity(self, clique4):
        view = SimilarityView.explicit(clique4)
        first = np.full(4, 0.5)
        second = second_eigenvector_deflated(view, first, PowerConfig(seed=2))
        assert abs(second @ first) < 1e-6
        assert np.linalg.norm(second) == pytest.approx(1.0)
        assert rayleigh_quotient(view, second) == pytest.approx(normalized_spectrum(view)[1], abs=0.1)

    def test_reaches_second_eigenvalue(self, two_triangles):
        view = SimilarityView.explicit(two_triangles)
        config = PowerConfig(epsilon=0.001)
        first = top_eigenvector(view, config)
        second = second_eigenvector_deflated(view, first, config)
        assert rayleigh_quotient(view, second) == pytest.approx(normalized_spectrum(view)[1], abs=1e-6)
        left = sweep_cut(view, second / np.sqrt(two_triangles.degree), const.FULL_BAND).left_ids
        assert set(left.tolist()) in ({0, 1, 2}, {3, 4, 5})

    def test_empty_deflated_space(self):
        data = VectorDataset(points=np.ones((3, 1)), unit_normalized=True)
        view = SimilarityView.implicit(data)
        np.testing.assert_array_equal(second_eigenvector_deflated(view, np.array([1.0]), PowerConfig()), [0.0])

    def test_first_must_be_unit(self, clique4):
        with pytest.raises(SimilarityError):
            second_eigenvector_deflated(SimilarityView.explicit(clique4), np.ones(4), PowerConfig())

    @pytest.mark.slow
    def test_power_iteration_quality_bound(self):
        """Rayleigh quotient >= lambda2 (1 - eps) / (1 + 4 n (1 - eps)^(2k)) in at least 3/16 of trials."""
        config = PowerConfig()
        hits = 0
        trials = 400
        for seed in range(trials):
            rng = np.random.default_rng(seed)
            data = VectorDataset(points=normalize_rows(rng.random((50, 6)) + 0.01), unit_normalized=True)
            view = SimilarityView.implicit(data)
            run = config.with_seed(seed)
            first = top_eigenvector(view, run)
            second = second_eigenvector_deflated(view, first, run)
            lambda2 = np.linalg.eigvalsh(view.normalized_matrix())[-2]
            k = run.iterations(view.m)
            bound = lambda2 * (1 - run.epsilon) / (1 + 4 * view.m * (1 - run.epsilon) ** (2 * k))
            hits += rayleigh_quotient(view, second) >= bound
        # one-sided binomial test at 99% against p = 3/16: lower critical value of Bin(400, 3/16) is 57
        assert hits >= 57


class TestJacobi:
    @pytest.mark.parametrize("n", [2, 5, 8])
    def test_matches_lapack(self, n):
        rng = np.random.default_rng(n)
        matrix = rng.standard_normal((n, n))
        matrix = matrix + matrix.T
        values, vectors = jacobi_eigh(matrix)
        np.testing.assert_allclose(np.sort(values), np.linalg.eigvalsh(matrix), atol=1e-8)
        np.testing.assert_allclose(matrix @ vectors, vectors * values, atol=1e-8)
        np.testing.assert_allclose(vectors.T @ vectors, np.eye(n), atol=1e-10)

    def test_one_by_one(self):
        values, vectors = jacobi_eigh([[4.0]])
        np.testing.assert_array_equal(values, [4.0])
        np.testing.assert_array_equal(vectors, [[1.0]])

    def test_sweep_cap(self):
        with pytest.raises(EigenSolverError):
            jacobi_eigh([[1.0, 2.0], [2.0, 1.0]], max_sweeps=0)

    def test_square_only(self):
        with pytest.raises(ModeError):
            jacobi_eigh(np.ones((2, 3)))


class TestExactSecondRightSingular:
    def test_tied_axes_keep_diagonal_order(self):
        data = VectorDataset(points=np.array([[1.0, 0], [1.0, 0], [0, 1.0], [0, 1.0]]), unit_normalized=True)
        np.testing.assert_allclose(exact_second_right_singular(SimilarityView.implicit(data)), [0.0, 1.0])

    def test_agrees_with_power_iteration(self, positive_vectors):
        view = SimilarityView.implicit(positive_vectors)
        config = PowerConfig(epsilon=0.01)
        approx = second_eigenvector_deflated(view, top_eigenvector(view, config), config)
        exact = exact_second_right_singular(view)
        assert abs(approx @ exact) >= 0.999

    def test_needs_two_dimensions(self):
        data = VectorDataset(points=np.ones((3, 1)), unit_normalized=True)
        with pytest.raises(SimilarityError):
            exact_second_right_singular(SimilarityView.implicit(data))

    def test_needs_vectors(self, clique4):
        with pytest.raises(ModeError):
            exact_second_right_singular(SimilarityView.explicit(clique4))


class TestSweepCut:
    def test_band_limits(self):
        assert band_limits(9, const.BALANCE_BAND) == (3, 6)
        assert band_limits(2, const.BALANCE_BAND) == (1, 1)
        assert band_limits(10, const.FULL_BAND) == (1, 9)
        with pytest.raises(SweepError):
            band_limits(10, (0.7, 0.3))

    def test_disconnected_pairs(self):
        result = sweep_cut(SimilarityView.explicit(TWO_PAIRS), np.array([-1.0, -1.0, 1.0, 1.0]))
        assert result.best_conductance == 0.0
        np.testing.assert_array_equal(np.sort(result.left_ids), [0, 1])

    def test_path_graph(self):
        coordinates = np.array([-3.0, -1.0, 1.0, 3.0]) / np.sqrt(20)
        result = sweep_cut(SimilarityView.explicit(PATH4), coordinates, const.FULL_BAND)
        assert result.best_index == 2
        assert result.best_conductance == pytest.approx(1 / 3)
        assert result.threshold == pytest.approx(-1 / np.sqrt(20))

    def test_equal_coordinates_fall_back_to_median(self, clique4):
        result = sweep_cut(SimilarityView.explicit(clique4), np.zeros(4))
        assert result.fallback
        assert result.best_index == 2

    def test_partial_ties_take_nearest_separating_prefix(self, two_triangles):
        coordinates = np.array([0.0, 1.0, 1.0, 1.0, 1.0, 1.0])
        result = sweep_cut(SimilarityView.explicit(two_triangles), coordinates)
        assert result.fallback
        assert result.best_index == 1
        np.testing.assert_array_equal(result.left_ids, [0])
        np.testing.assert_array_equal(np.flatnonzero(coordinates <= result.threshold), result.left_ids)

    def test_nearest_separating_prefix(self):
        assert nearest_separating_prefix(np.zeros(5), 2, 3) is None
        assert nearest_separating_prefix(np.array([0.0, 0.0, 0.0, 0.0, 1.0, 1.0]), 2, 3) == 4
        assert nearest_separating_prefix(np.array([0.0, 1.0, 1.0, 1.0, 1.0, 2.0]), 2, 4) == 1
        assert nearest_separating_prefix(np.array([0.0, 1.0, 2.0, 3.0]), 2, 2) == 2

    def test_balanced_tie_break(self, clique4):
        result = sweep_cut(SimilarityView.explicit(clique4), np.arange(4.0), const.FULL_BAND)
        assert result.best_index == 2
        assert result.best_conductance == pytest.approx(2 / 3)

    def test_skips_prefixes_splitting_ties(self, two_triangles):
        result = sweep_cut(SimilarityView.explicit(two_triangles), np.array([0, 0, 0, 1, 1, 1.0]), const.FULL_BAND)
        np.testing.assert_array_equal(np.sort(result.left_ids), [0, 1, 2])
        assert result.best_conductance == pytest.approx(1 / 7)

    @pytest.mark.parametrize("band", [const.FULL_BAND, const.BALANCE_BAND])
    def test_best_prefix_matches_direct_conductance(self, positive_vectors, band):
        view = SimilarityView.implicit(positive_vectors)
        coordinates = np.random.default_rng(1).standard_normal(view.m)
        result = sweep_cut(view, coordinates, band)
        first, last = band_limits(view.m, band)
        direct = [view.conductance(result.order[:j]) for j in range(first, last + 1)]
        assert result.best_conductance == pytest.approx(min(direct), rel=1e-9)
        assert view.conductance(result.left_ids) == pytest.approx(result.best_conductance, rel=1e-9)

    def test_explicit_subset_uses_global_volumes(self, two_triangles):
        view = SimilarityView.explicit(two_triangles).restrict([1, 2, 3, 4])
        result = sweep_cut(view, np.array([0.0, 1.0, 2.0, 3.0]), const.FULL_BAND)
        assert view.conductance(result.left_ids) == pytest.approx(result.best_conductance)

    def test_length_mismatch(self, clique4):
        with pytest.raises(SweepError):
            sweep_cut(SimilarityView.explicit(clique4), np.zeros(3))


class TestExhaustiveConductance:
    def test_two_triangles(self, two_triangles):
        gamma, left = exhaustive_min_conductance(SimilarityView.explicit(two_triangles))
        assert gamma == pytest.approx(1 / 7)
        np.testing.assert_array_equal(left, [0, 1, 2])

    def test_matches_brute_force(self):
        graph = random_graph(7, 0.5, np.random.default_rng(4))
        view = SimilarityView.explicit(graph)
        brute = min(view.conductance(list(subset)) for size in range(1, 7)
                    for subset in itertools.combinations(range(7), size))
        assert exhaustive_min_conductance(view)[0] == pytest.approx(brute)

    def test_size_limit(self):
        view = SimilarityView.explicit(random_graph(21, 0.2, np.random.default_rng(0)))
        with pytest.raises(SimilarityError):
            exhaustive_min_conductance(view)


class TestGraphInequalities:
    @pytest.mark.parametrize("seed", range(20))
    def test_cheeger_sandwich(self, seed):
        rng = np.random.default_rng(seed)
        view = SimilarityView.explicit(random_graph(int(rng.integers(4, 11)), 0.4, rng))
        lambda2 = normalized_spectrum(view)[1]
        gamma, _ = exhaustive_min_conductance(view)
        assert (1 - lambda2) / 2 - 1e-9 <= gamma <= np.sqrt(2 * (1 - lambda2)) + 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_degree_bounds(self, seed):
        rng = np.random.default_rng(100 + seed)
        graph = random_graph(8, 0.5, rng)
        view = SimilarityView.explicit(graph)
        low, high = graph.degree.min(), graph.degree.max()
        for size in range(1, 8):
            for subset in itertools.combinations(range(8), size):
                phi = view.expansion(list(subset))
                gamma = view.conductance(list(subset))
                assert phi / high - 1e-12 <= gamma <= phi / low + 1e-12
