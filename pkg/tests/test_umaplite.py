import numpy as np
import pytest

from chartbench.linalg import pairwise_sq_dists
from chartbench.umaplite import build_fuzzy_graph, curve_params, optimize_layout


def brute_trustworthiness(X, Y, k):
    """Neighborhood-preservation score, computed by brute-force ranking."""
    n = X.shape[0]
    DX = pairwise_sq_dists(X) + np.diag(np.full(n, np.inf))
    DY = pairwise_sq_dists(Y) + np.diag(np.full(n, np.inf))
    amb_rank = np.argsort(np.argsort(DX, axis=1, kind="stable"), axis=1, kind="stable")
    emb_nbr = np.argsort(DY, axis=1, kind="stable")[:, :k]
    total = 0.0
    for i in range(n):
        for j in emb_nbr[i]:
            r = amb_rank[i, j]
            if r >= k:
                total += r - k + 1
    return 1.0 - 2.0 / (n * k * (2 * n - 3 * k - 1)) * total


class TestCurveParams:
    def test_default_fit_values(self):
        a, b = curve_params()
        assert abs(a - 1.577) <= 2e-3
        assert abs(b - 0.895) <= 2e-3


class TestFuzzyGraph:
    def test_calibration_residual(self):
        for seed, n, k in [(0, 120, 15), (1, 80, 8)]:
            X = np.random.default_rng(seed).normal(size=(n, 3))
            g = build_fuzzy_graph(X, k)
            D2 = pairwise_sq_dists(X)
            order = np.argsort(D2, axis=1, kind="stable")[:, 1 : k + 1]
            nd = np.sqrt(D2[np.arange(n)[:, None], order])
            cal = np.exp(-np.maximum(nd - g.rho[:, None], 0.0) / g.sigma[:, None]).sum(axis=1)
            assert np.abs(cal - np.log2(k)).max() <= 1e-5

    def test_nearest_neighbor_membership_is_one(self):
        X = np.random.default_rng(2).normal(size=(50, 3))
        g = build_fuzzy_graph(X, 6)
        W = g.membership_matrix()
        D2 = pairwise_sq_dists(X) + np.diag(np.full(50, np.inf))
        nearest = np.argmin(D2, axis=1)
        assert np.all(W[np.arange(50), nearest] == 1.0)

    def test_symmetry_exact(self):
        X = np.random.default_rng(3).normal(size=(70, 4))
        W = build_fuzzy_graph(X, 10).membership_matrix()
        assert np.array_equal(W, W.T)
        assert np.all(W[W > 0] <= 1.0)

    def test_weights_in_unit_interval(self):
        X = np.random.default_rng(4).normal(size=(40, 2))
        g = build_fuzzy_graph(X, 5)
        assert np.all(g.weight > 0.0) and np.all(g.weight <= 1.0)
        assert np.all(g.sigma > 0.0)

    def test_all_tied_neighborhood_saturates(self):
        # regular simplex: every neighbor distance equal; the rho shift then
        # zeroes every exponent and memberships saturate at 1
        X = np.eye(5)
        g = build_fuzzy_graph(X, 4)
        assert np.all(g.weight == 1.0)

    def test_rejects_duplicates_and_bad_k(self):
        with pytest.raises(ValueError):
            build_fuzzy_graph(np.array([[0.0], [0.0], [1.0]]), 2)
        with pytest.raises(ValueError):
            build_fuzzy_graph(np.random.default_rng(5).normal(size=(10, 2)), 10)


class TestOptimizeLayout:
    def test_deterministic_and_finite(self):
        X = np.random.default_rng(6).normal(size=(150, 3))
        g = build_fuzzy_graph(X, 10)
        e1 = optimize_layout(g, 2, epochs=50, seed=9)
        e2 = optimize_layout(g, 2, epochs=50, seed=9)
        assert np.array_equal(e1.U, e2.U)
        assert np.all(np.isfinite(e1.U))
        assert e1.meta["variant"] == "umap-lite"

    def test_seed_changes_layout(self):
        X = np.random.default_rng(7).normal(size=(120, 3))
        g = build_fuzzy_graph(X, 8)
        e1 = optimize_layout(g, 2, epochs=30, seed=1)
        e2 = optimize_layout(g, 2, epochs=30, seed=2)
        assert not np.array_equal(e1.U, e2.U)

    def test_coordinates_bounded(self):
        X = np.random.default_rng(8).normal(size=(200, 3))
        g = build_fuzzy_graph(X, 10)
        emb = optimize_layout(g, 3, epochs=100, seed=3)
        assert np.abs(emb.U).max() <= 1e3

    def test_swiss_roll_trustworthiness(self, default_dataset):
        g = build_fuzzy_graph(default_dataset.X, 15)
        emb = optimize_layout(g, 2, epochs=200, seed=7)
        t = brute_trustworthiness(default_dataset.X, emb.U, k=10)
        assert t >= 0.95

    def test_rejects_bad_args(self):
        X = np.random.default_rng(9).normal(size=(30, 2))
        g = build_fuzzy_graph(X, 5)
        with pytest.raises(ValueError):
            optimize_layout(g, 0)
        with pytest.raises(ValueError):
            optimize_layout(g, 2, epochs=0)
        with pytest.raises(ValueError):
            optimize_layout(g, 30)
