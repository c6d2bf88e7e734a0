import numpy as np
import pytest

from chartbench import synth
from chartbench.dmap import (
    BetaRule,
    KernelConfig,
    alpha_normalize,
    fit_diffusion,
    gaussian_kernel,
    laplacian_spectrum,
    markov_operator,
    nystrom_extend,
    resolve_beta,
    truncate,
)
from chartbench.diagnostics import effective_ranks
from chartbench.linalg import pairwise_sq_dists


def swiss_roll(n, seed=7):
    return synth.roll(synth.sample_sheet(n, 60, 10, seed=seed))


class TestGaussianKernel:
    def test_unit_at_zero_distance(self):
        D2 = np.array([[0.0, 0.0], [0.0, 0.0]])
        assert np.all(gaussian_kernel(D2, 1.0) == 1.0)

    def test_half_at_log_two(self):
        D2 = np.array([[0.0, np.log(2.0)], [np.log(2.0), 0.0]])
        assert np.isclose(gaussian_kernel(D2, 1.0)[0, 1], 0.5)

    def test_flat_limit_is_rank_one(self):
        X = np.random.default_rng(0).normal(size=(12, 3))
        P = gaussian_kernel(pairwise_sq_dists(X), 1e-12)
        assert np.all(P > 1 - 1e-9)

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ValueError):
            gaussian_kernel(np.zeros((2, 2)), 0.0)


class TestResolveBeta:
    def test_explicit(self):
        assert resolve_beta(np.zeros((3, 3)), BetaRule.explicit(0.1)) == 0.1

    def test_two_point_median(self):
        D2 = np.array([[0.0, 4.0], [4.0, 0.0]])
        assert resolve_beta(D2, BetaRule.median_scaled(1.0)) == 0.25

    def test_median_kernel_entry_is_exp_minus_c(self):
        X = np.random.default_rng(1).normal(size=(100, 3))
        D2 = pairwise_sq_dists(X)
        c = 2.5
        beta = resolve_beta(D2, BetaRule.median_scaled(c))
        off = gaussian_kernel(D2, beta)[np.triu_indices(100, 1)]
        assert np.isclose(np.median(off), np.exp(-c), rtol=1e-10)

    def test_rejects_duplicate_only(self):
        with pytest.raises(ValueError):
            resolve_beta(np.zeros((3, 3)), BetaRule.median_scaled(1.0))

    def test_parse(self):
        assert BetaRule.parse("median:1.5") == BetaRule.median_scaled(1.5)
        assert BetaRule.parse("0.25") == BetaRule.explicit(0.25)
        with pytest.raises(ValueError):
            BetaRule.parse("nonsense:1")


class TestAlphaNormalize:
    def test_alpha_zero_identity(self):
        P = np.random.default_rng(2).uniform(0.1, 1.0, size=(5, 5))
        P = (P + P.T) / 2
        assert alpha_normalize(P, 0.0) is P

    def test_constant_kernel(self):
        P = np.ones((3, 3))
        assert np.allclose(alpha_normalize(P, 1.0), 1.0 / 9.0)

    def test_markov_rows_still_stochastic(self):
        X = np.random.default_rng(3).normal(size=(40, 3))
        for alpha in (0.0, 0.5, 1.0):
            P_plus, *_ = markov_operator(X, KernelConfig(alpha=alpha))
            assert np.abs(P_plus.sum(axis=1) - 1.0).max() <= 1e-12


class TestFitDiffusion:
    def test_stationary_mode(self, small_basis):
        assert small_basis.lambdas[0] == 1.0
        psi0 = small_basis.psi[:, 0]
        assert np.abs(psi0 - psi0.mean()).max() <= 1e-8 * abs(psi0.mean())

    def test_two_point_closed_form(self):
        # distance 1 apart, explicit beta so the kernel entry is p
        p = 0.37
        X = np.array([[0.0], [1.0]])
        cfg = KernelConfig(beta_rule=BetaRule.explicit(-np.log(p)), alpha=0.0)
        basis = fit_diffusion(X, cfg, k=2)
        assert np.isclose(basis.lambdas[1], (1 - p) / (1 + p), atol=1e-12)
        v = basis.psi[:, 1]
        assert np.isclose(abs(v[0]), abs(v[1]), atol=1e-12)
        assert np.sign(v[0]) != np.sign(v[1])

    def test_markov_residuals_small(self):
        ds = swiss_roll(200)
        basis = fit_diffusion(ds.X, KernelConfig(), k=20)
        P_plus, *_ = markov_operator(ds.X, basis.config)
        resid = P_plus @ basis.psi - basis.psi * basis.lambdas[None, :]
        assert np.abs(resid).max() <= 1e-7

    def test_weighted_orthonormality(self, small_basis):
        pi = small_basis.degrees / small_basis.degrees.sum()
        G = small_basis.psi.T @ (pi[:, None] * small_basis.psi)
        assert np.abs(G - np.eye(small_basis.n_modes)).max() <= 1e-8

    def test_psd_spectrum_and_bounds(self, small_basis):
        lam = small_basis.lambdas
        assert np.all(lam >= 0.0) and np.all(lam <= 1.0)
        assert np.all(np.diff(lam) <= 1e-15)

    def test_spectral_equivalence_with_markov_operator(self):
        # the paper's similarity claim: S and P+ share eigenvalues
        ds = swiss_roll(250, seed=11)
        basis = fit_diffusion(ds.X, KernelConfig(), k=250)
        P_plus, *_ = markov_operator(ds.X, basis.config)
        ev = np.sort(np.real(np.linalg.eigvals(P_plus)))[::-1]
        assert np.abs(ev - basis.lambdas).max() <= 1e-9

    def test_beta_limit_ranks(self):
        ds = swiss_roll(100)
        D2 = pairwise_sq_dists(ds.X)
        thr_lo, *_ = effective_ranks(gaussian_kernel(D2, 1e-8), tau=1e-3)
        thr_hi, *_ = effective_ranks(gaussian_kernel(D2, 1e8), tau=1e-3)
        assert thr_lo == 1
        assert thr_hi >= 95

    def test_rejects_duplicates_with_diagnostic(self):
        X = np.array([[1.0, 2.0], [3.0, 4.0], [1.0, 2.0]])
        with pytest.raises(ValueError, match="duplicate points .rows 0 and 2."):
            fit_diffusion(X, KernelConfig(), k=2)

    def test_rejects_bad_k(self):
        X = np.random.default_rng(4).normal(size=(10, 2))
        with pytest.raises(ValueError):
            fit_diffusion(X, KernelConfig(), k=11)


class TestLaplacianSpectrum:
    def test_complement_and_order(self, small_basis):
        mu = laplacian_spectrum(small_basis)
        assert mu[0] == 0.0
        assert np.all(np.diff(mu) >= -1e-15)
        assert np.allclose(mu, 1.0 - small_basis.lambdas)
        assert np.all((mu >= 0.0) & (mu <= 1.0))


class TestTruncate:
    def test_single_mode(self, small_basis):
        emb = truncate(small_basis, 1)
        assert emb.d == 1
        assert np.array_equal(emb.U[:, 0], small_basis.psi[:, 1])

    def test_nested_prefix_bit_exact(self, small_basis):
        e3 = truncate(small_basis, 3)
        e9 = truncate(small_basis, 9)
        assert np.array_equal(e3.U, e9.U[:, :3])

    def test_rejects_too_large(self, small_basis):
        with pytest.raises(ValueError):
            truncate(small_basis, small_basis.n_modes)


class TestNystrom:
    def test_training_points_are_fixed(self, small_basis):
        keep = int(np.sum(small_basis.lambdas >= 1e-6))
        ext = nystrom_extend(small_basis, small_basis.train_X, n_modes=keep)
        assert np.abs(ext - small_basis.psi[:, :keep]).max() <= 1e-6

    def test_stationary_mode_extends_to_constant(self, small_basis):
        rng = np.random.default_rng(5)
        X_new = small_basis.train_X[:20] + rng.normal(scale=0.05, size=(20, 3))
        ext = nystrom_extend(small_basis, X_new, n_modes=1)
        psi0 = small_basis.psi[0, 0]
        assert np.abs(ext[:, 0] - psi0).max() <= 1e-8 * abs(psi0)

    def test_midpoint_of_symmetric_pair_is_zero(self):
        X = np.array([[-1.0], [1.0]])
        cfg = KernelConfig(beta_rule=BetaRule.explicit(0.3), alpha=0.0)
        basis = fit_diffusion(X, cfg, k=2)
        ext = nystrom_extend(basis, np.array([[0.0]]))
        assert abs(ext[0, 1]) <= 1e-12

    def test_rejects_tiny_eigenvalue_naming_mode(self):
        X = np.array([[0.0], [1.0]])
        cfg = KernelConfig(beta_rule=BetaRule.explicit(1e-13), alpha=0.0)
        basis = fit_diffusion(X, cfg, k=2)
        assert basis.lambdas[1] <= 1e-12
        with pytest.raises(ValueError, match="mode 1"):
            nystrom_extend(basis, np.array([[0.5]]))
