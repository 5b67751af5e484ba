import math

import numpy as np
import pytest

from policytopics.errors import ParamError
from policytopics.reduction import (
    FuzzyGraph,
    NeighborEmbedding,
    ReduceParams,
    attractive_gradient,
    attractive_objective,
    build_fuzzy_graph,
    fit_kernel,
    fuzzy_graph,
    knn,
    optimize_layout,
    repulsive_gradient,
    repulsive_objective,
    smooth_knn,
    spectral_init,
)

from util import brute_knn, central_difference


class TestKnn:
    def test_line_example(self):
        X = np.array([[0.0], [1.0], [3.0]])
        idx, d = knn(X, 1, "euclidean")
        assert idx[:, 0].tolist() == [1, 0, 1]
        assert d[:, 0].tolist() == [1.0, 1.0, 2.0]

    def test_k_equal_n_rejected(self):
        X = np.zeros((4, 2))
        with pytest.raises(ParamError):
            knn(X, 4, "euclidean")

    @pytest.mark.parametrize("metric", ["euclidean", "cosine"])
    def test_matches_exhaustive_scan(self, metric):
        rng = np.random.default_rng(17)
        X = rng.normal(size=(50, 4))
        idx, d = knn(X, 5, metric)
        bidx, bd = brute_knn(X, 5, metric)
        assert np.allclose(d, bd, atol=1e-9)
        # indices may differ only where distances tie exactly
        mismatch = idx != bidx
        assert np.allclose(d[mismatch], bd[mismatch])

    def test_tie_break_lower_index(self):
        X = np.array([[0.0], [1.0], [-1.0], [2.0]])
        idx, _ = knn(X, 2, "euclidean")
        assert idx[0].tolist() == [1, 2]  # both at distance 1; lower index first


class TestSmoothKnn:
    def test_all_equal_distances_clamp(self):
        d = np.full((1, 4), 0.7)
        rho, sigma = smooth_knn(d, 4)
        assert rho[0] == pytest.approx(0.7)
        assert sigma[0] == pytest.approx(1e-12)

    def test_spec_bisection_example(self):
        d = np.array([[1.0, 2.0, 3.0, 5.0]])
        rho, sigma = smooth_knn(d, 4)
        assert rho[0] == pytest.approx(1.0)
        # defining equation holds to the bisection tolerance
        total = 1 + math.exp(-1 / sigma[0]) + math.exp(-2 / sigma[0]) + math.exp(-4 / sigma[0])
        assert abs(total - 2.0) <= 1e-5
        # independent scalar bisection oracle for
        # 1 + e^(-1/s) + e^(-2/s) + e^(-4/s) = 2
        lo, hi = 1e-12, 1e12
        for _ in range(200):
            mid = (lo + hi) / 2.0
            val = 1 + math.exp(-1 / mid) + math.exp(-2 / mid) + math.exp(-4 / mid)
            if val > 2.0:
                hi = mid
            else:
                lo = mid
        assert sigma[0] == pytest.approx(mid, abs=1e-4)
        assert sigma[0] == pytest.approx(1.77810, abs=2e-4)

    def test_target_is_log2_k(self):
        assert math.log2(4) == 2.0
        rng = np.random.default_rng(23)
        d = np.sort(rng.uniform(0.1, 2.0, size=(30, 8)), axis=1)
        rho, sigma = smooth_knn(d, 8)
        sums = np.exp(-np.maximum(0.0, d - rho[:, None]) / sigma[:, None]).sum(axis=1)
        assert np.all(np.abs(sums - math.log2(8)) <= 1e-3)

    def test_zero_distances_rho_zero(self):
        d = np.zeros((1, 3))
        rho, sigma = smooth_knn(d, 3)
        assert rho[0] == 0.0
        assert sigma[0] == pytest.approx(1e-12)


class TestFuzzyGraph:
    @pytest.mark.parametrize(
        "wij,wji,expected", [(0.5, 0.5, 0.75), (1.0, 0.0, 1.0), (0.2, 0.4, 0.52)]
    )
    def test_symmetrization_cases(self, wij, wji, expected):
        assert wij + wji - wij * wji == pytest.approx(expected)

    def test_symmetrized_weights(self):
        # two points each other's neighbor with different calibrations
        indices = np.array([[1], [0]])
        dists = np.array([[1.0], [1.0]])
        rho = np.array([0.5, 1.0])
        sigma = np.array([1.0, 2.0])
        g = fuzzy_graph(indices, dists, rho, sigma)
        wij = math.exp(-0.5)
        wji = 1.0  # d <= rho
        assert len(g.edges) == 1
        i, j, w = g.edges[0]
        assert (i, j) == (0, 1)
        assert w == pytest.approx(wij + wji - wij * wji)

    def test_weights_in_unit_interval(self):
        rng = np.random.default_rng(31)
        X = rng.normal(size=(80, 6))
        g = build_fuzzy_graph(X, 10, "euclidean")
        assert np.all(g.weights > 0.0)
        assert np.all(g.weights <= 1.0 + 1e-12)

    def test_nearest_neighbor_weight_is_one(self):
        rng = np.random.default_rng(32)
        X = rng.normal(size=(40, 3))
        idx, d = knn(X, 6, "euclidean")
        rho, sigma = smooth_knn(d, 6)
        directed = np.exp(-np.maximum(0.0, d - rho[:, None]) / sigma[:, None])
        assert np.allclose(directed[:, 0], 1.0)
        g = fuzzy_graph(idx, d, rho, sigma)
        best = np.zeros(40)
        for i, j, w in g.edges:
            best[i] = max(best[i], w)
            best[j] = max(best[j], w)
        assert np.allclose(best, 1.0)

    def test_symmetrization_commutes(self):
        rng = np.random.default_rng(33)
        a = rng.uniform(0, 1, 100)
        b = rng.uniform(0, 1, 100)
        assert np.allclose(a + b - a * b, b + a - b * a)


class TestFitKernel:
    def test_reference_values_min_dist_01(self):
        a, b = fit_kernel(0.1)
        assert a == pytest.approx(1.58, abs=0.02)
        assert b == pytest.approx(0.90, abs=0.02)

    def test_phi_at_zero_is_one(self):
        a, b = fit_kernel(0.0)
        assert 1.0 / (1.0 + a * 0.0 ** (2 * b)) == 1.0

    def test_phi_monotone_decreasing(self):
        a, b = fit_kernel(0.25)
        d = np.linspace(1e-6, 3.0, 200)
        phi = 1.0 / (1.0 + a * d ** (2 * b))
        assert np.all(np.diff(phi) < 0.0)

    def test_grid_search_oracle_agrees(self):
        # coarse grid + refinement, independent of curve_fit
        min_dist = 0.1
        xv = np.linspace(0.0, 3.0, 300)
        yv = np.where(xv <= min_dist, 1.0, np.exp(-(xv - min_dist)))

        def sse(a, b):
            return float(np.sum((1.0 / (1.0 + a * xv ** (2 * b)) - yv) ** 2))

        best = (1.0, 1.0)
        lo_a, hi_a, lo_b, hi_b = 0.2, 5.0, 0.3, 2.0
        for _ in range(6):
            grid_a = np.linspace(lo_a, hi_a, 21)
            grid_b = np.linspace(lo_b, hi_b, 21)
            best = min(((a, b) for a in grid_a for b in grid_b), key=lambda p: sse(*p))
            span_a = (hi_a - lo_a) / 8
            span_b = (hi_b - lo_b) / 8
            lo_a, hi_a = best[0] - span_a, best[0] + span_a
            lo_b, hi_b = best[1] - span_b, best[1] + span_b
        a, b = fit_kernel(min_dist)
        assert a == pytest.approx(best[0], abs=0.02)
        assert b == pytest.approx(best[1], abs=0.02)
        assert sse(a, b) <= sse(*best) + 1e-6


class TestGradients:
    def test_attractive_matches_finite_differences(self):
        rng = np.random.default_rng(41)
        worst = 0.0
        for _ in range(200):
            dim = int(rng.integers(2, 6))
            yi = rng.normal(size=dim)
            yj = rng.normal(size=dim)
            if np.sum((yi - yj) ** 2) < 0.01:
                continue
            a = float(rng.uniform(0.5, 2.0))
            b = float(rng.uniform(0.7, 1.2))
            grad = attractive_gradient(yi, yj, a, b)
            fd = central_difference(lambda y: attractive_objective(y, yj, a, b), yi)
            rel = np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1e-12)
            worst = max(worst, rel)
        assert worst <= 1e-4

    def test_repulsive_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(200):
            dim = int(rng.integers(2, 6))
            yi = rng.normal(size=dim)
            yk = rng.normal(size=dim)
            if np.sum((yi - yk) ** 2) < 0.01:
                continue
            a = float(rng.uniform(0.5, 2.0))
            b = float(rng.uniform(0.7, 1.2))
            grad = repulsive_gradient(yi, yk, a, b)
            fd = central_difference(lambda y: repulsive_objective(y, yk, a, b), yi)
            rel = np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1e-12)
            worst = max(worst, rel)
        assert worst <= 1e-4


def two_point_graph() -> FuzzyGraph:
    return FuzzyGraph(
        edge_i=np.array([0], dtype=np.int64),
        edge_j=np.array([1], dtype=np.int64),
        weights=np.array([1.0]),
        n=2,
    )


class TestOptimizeLayout:
    def test_zero_epochs_returns_init(self):
        g = two_point_graph()
        init = np.array([[0.0, 0.0], [10.0, 0.0]])
        params = ReduceParams(n_components=2, n_epochs=0, negative_samples=0)
        out = optimize_layout(g, params, init=init)
        assert np.array_equal(out, init)

    def test_two_points_attract_monotonically(self):
        g = two_point_graph()
        coords = np.array([[0.0, 0.0], [10.0, 0.0]])
        params = ReduceParams(
            n_components=2, n_epochs=1, negative_samples=0, learning_rate=0.5, seed=3
        )
        prev = 10.0
        for _ in range(60):
            coords = optimize_layout(g, params, init=coords)
            dist = float(np.linalg.norm(coords[0] - coords[1]))
            if prev >= 1.5:  # strict decrease until the near-field scale
                assert dist < prev
            prev = dist
            if dist < 1.5:
                break
        assert prev < 2.0

    def test_bit_identical_given_seed(self):
        rng = np.random.default_rng(55)
        X = rng.normal(size=(60, 8))
        g = build_fuzzy_graph(X, 8, "euclidean")
        params = ReduceParams(n_neighbors=8, n_components=3, n_epochs=50, seed=11)
        out1 = optimize_layout(g, params)
        out2 = optimize_layout(g, params)
        assert np.array_equal(out1, out2)

    def test_negative_epochs_rejected(self):
        with pytest.raises(ParamError):
            ReduceParams(n_epochs=-1)

    def test_empty_graph_rejected(self):
        g = FuzzyGraph(np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0), 2)
        with pytest.raises(ParamError):
            optimize_layout(g, ReduceParams(n_components=2))

    def test_parallel_mode_runs(self):
        # parallel-epoch mode promises no bit-exactness, only a valid layout
        rng = np.random.default_rng(56)
        X = rng.normal(size=(40, 6))
        g = build_fuzzy_graph(X, 6, "euclidean")
        params = ReduceParams(n_neighbors=6, n_components=2, n_epochs=20, seed=1)
        out = optimize_layout(g, params, deterministic=False)
        assert out.shape == (40, 2)
        assert np.all(np.isfinite(out))


class TestSpectralInit:
    def test_shape_and_determinism(self):
        rng = np.random.default_rng(60)
        X = rng.normal(size=(30, 4))
        g = build_fuzzy_graph(X, 5, "euclidean")
        c1 = spectral_init(g, 2, seed=9)
        c2 = spectral_init(g, 2, seed=9)
        assert c1.shape == (30, 2)
        assert np.array_equal(c1, c2)
        assert np.abs(c1).max() <= 10.5

    def test_fallback_for_tiny_graph(self):
        g = two_point_graph()
        coords = spectral_init(g, 5, seed=4)  # 5 components > n forces fallback
        assert coords.shape == (2, 5)
        assert np.all(np.abs(coords) <= 10.0)


class TestEstimator:
    def test_fit_transform_separates_two_groups(self):
        rng = np.random.default_rng(71)
        X = np.vstack(
            [
                np.array([10.0, 0.0, 0.0]) + rng.normal(0, 0.5, size=(30, 3)),
                np.array([0.0, 10.0, 0.0]) + rng.normal(0, 0.5, size=(30, 3)),
            ]
        )
        emb = NeighborEmbedding(
            n_neighbors=8, n_components=2, n_epochs=100, seed=2, metric="euclidean"
        ).fit_transform(X)
        assert emb.shape == (60, 2)
        a, b = emb[:30].mean(axis=0), emb[30:].mean(axis=0)
        within = max(emb[:30].std(axis=0).max(), emb[30:].std(axis=0).max())
        assert np.linalg.norm(a - b) > 3 * within

    def test_get_params(self):
        est = NeighborEmbedding(n_neighbors=7)
        assert est.get_params()["n_neighbors"] == 7
