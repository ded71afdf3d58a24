"""FPCA basis and score-mixture EM tests."""

import numpy as np
import pytest

from skytwin.perf.fpca import FitError, FunctionalBasis, fit_fpca
from skytwin.perf.gmm import ScoreGMM, fit_gmm


def synth_curves(rng, n=200, grid_n=30):
    grid = np.linspace(100, 350, grid_n)
    base = 0.02 * (grid - 200)
    modes = np.stack([np.sin(grid / 40.0), np.cos(grid / 90.0)])
    scores = rng.normal(0, [3.0, 1.0], size=(n, 2))
    return grid, base + scores @ modes


def test_full_rank_reconstruction_and_variance():
    rng = np.random.default_rng(1)
    grid, curves = synth_curves(rng)
    basis = fit_fpca(grid, curves, k_components=len(grid))
    # full basis reproduces every curve
    rec = basis.reconstruct(basis.project(curves))
    assert np.max(np.abs(rec - curves)) < 1e-8
    # eigenvalue sum equals covariance trace
    cov = np.cov(curves.T, ddof=1)
    assert basis.eigenvalues.sum() == pytest.approx(np.trace(cov), rel=1e-9)


def test_orthonormality_enforced():
    rng = np.random.default_rng(2)
    grid, curves = synth_curves(rng)
    basis = fit_fpca(grid, curves, k_components=4)
    gram = basis.eigenfunctions @ basis.eigenfunctions.T
    assert np.allclose(gram, np.eye(4), atol=1e-10)


def test_two_mode_data_needs_two_components():
    rng = np.random.default_rng(3)
    grid, curves = synth_curves(rng, n=500)
    basis = fit_fpca(grid, curves, k_components=None, variance_target=0.95)
    assert basis.n_components == 2
    # score variances track the generating spread
    scores = basis.project(curves)
    assert np.var(scores[:, 0], ddof=1) == pytest.approx(basis.eigenvalues[0], rel=1e-9)


def test_degenerate_corpus_zero_eigenvalues():
    grid = np.linspace(0, 100, 11)
    curves = np.tile(np.sin(grid / 10.0), (40, 1))
    basis = fit_fpca(grid, curves, k_components=2)
    assert np.all(basis.eigenvalues < 1e-20)
    assert np.allclose(basis.mean_curve, curves[0])


def test_fpca_rejects_bad_shapes():
    with pytest.raises(FitError):
        fit_fpca(np.array([1.0, 2.0]), np.zeros((5, 3)))


# --- GMM -----------------------------------------------------------------

def two_component_samples(rng, n=2000):
    means = np.array([[-3.0, 0.0], [3.0, 1.0]])
    covs = np.array([[[1.0, 0.3], [0.3, 0.5]], [[0.6, -0.2], [-0.2, 1.2]]])
    comp = rng.random(n) < 0.4
    out = np.empty((n, 2))
    out[comp] = rng.multivariate_normal(means[0], covs[0], comp.sum())
    out[~comp] = rng.multivariate_normal(means[1], covs[1], (~comp).sum())
    return out, means


def test_em_recovers_two_component_means():
    rng = np.random.default_rng(10)
    x, true_means = two_component_samples(rng)
    gmm = fit_gmm(x, 2, seed=0)
    got = gmm.means[np.argsort(gmm.means[:, 0])]
    want = true_means[np.argsort(true_means[:, 0])]
    assert np.all(np.abs(got - want) < 0.1 * np.maximum(1.0, np.abs(want)))
    assert gmm.weights.min() > 0.3


def test_em_deterministic_per_seed():
    rng = np.random.default_rng(11)
    x, _ = two_component_samples(rng, n=500)
    a = fit_gmm(x, 2, seed=5)
    b = fit_gmm(x, 2, seed=5)
    assert np.array_equal(a.means, b.means)
    assert np.array_equal(a.covariances, b.covariances)


def test_degenerate_scores_regularized_to_point_mass():
    x = np.zeros((100, 3))
    gmm = fit_gmm(x, 1, seed=1)
    assert np.allclose(gmm.means, 0.0, atol=1e-9)
    assert np.all(np.abs(gmm.covariances) <= 1e-5)


def test_sampling_moments_match_mixture():
    gmm = ScoreGMM(
        weights=np.array([0.5, 0.5]),
        means=np.array([[-2.0, 0.0], [2.0, 0.0]]),
        covariances=np.array([np.eye(2) * 0.5, np.eye(2) * 1.5]),
    )
    rng = np.random.default_rng(123)
    draws = gmm.sample(rng, 20000)
    emp_cov = np.cov(draws.T, ddof=1)
    want = gmm.mixture_covariance()
    assert np.linalg.norm(emp_cov - want) < 0.10 * np.linalg.norm(want)
    assert np.allclose(draws.mean(axis=0), gmm.mixture_mean(), atol=0.05)


def test_zero_covariance_sampling_is_exact():
    gmm = ScoreGMM(
        weights=np.array([1.0]),
        means=np.array([[1.5, -2.0]]),
        covariances=np.zeros((1, 2, 2)),
    )
    rng = np.random.default_rng(0)
    draws = gmm.sample(rng, 10)
    assert np.array_equal(draws, np.tile([1.5, -2.0], (10, 1)))


def test_mixture_mean_symmetric_cancels():
    gmm = ScoreGMM(
        weights=np.array([0.5, 0.5]),
        means=np.array([[4.0, -1.0], [-4.0, 1.0]]),
        covariances=np.array([np.eye(2), np.eye(2)]),
    )
    assert np.allclose(gmm.mixture_mean(), 0.0)


def test_gmm_rejects_bad_weights():
    with pytest.raises(FitError):
        ScoreGMM(weights=np.array([0.7, 0.7]), means=np.zeros((2, 1)),
                 covariances=np.ones((2, 1, 1)))
