import numpy as np
import pytest

from noisereg import default_ridge_grid, ridge_cv, ridge_fit


def test_lambda_zero_is_ols():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((20, 4))
    y = rng.standard_normal(20)
    b = ridge_fit(X, y, 0.0)
    bls, *_ = np.linalg.lstsq(X, y, rcond=None)
    assert np.allclose(b, bls, atol=1e-10)


def test_huge_lambda_shrinks_to_zero():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((20, 3))
    y = rng.standard_normal(20)
    b = ridge_fit(X, y, 1e9)
    assert np.linalg.norm(b) < 1e-6


def test_orthonormal_closed_form():
    rng = np.random.default_rng(2)
    Q, _ = np.linalg.qr(rng.standard_normal((25, 4)))
    y = rng.standard_normal(25)
    lam = 0.7
    b = ridge_fit(Q, y, lam)
    assert np.allclose(b, (Q.T @ y) / (1 + lam), atol=1e-12)


def test_singular_at_zero_rejected():
    X = np.ones((5, 2))  # rank 1
    with pytest.raises(np.linalg.LinAlgError):
        ridge_fit(X, np.ones(5), 0.0)


def test_negative_lambda_rejected():
    with pytest.raises(ValueError):
        ridge_fit(np.eye(3), np.ones(3), -1.0)


def test_monotone_shrinkage_orthonormal():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rng.standard_normal((30, 5)))
    y = rng.standard_normal(30)
    lams = [0.1, 1.0, 10.0, 100.0]
    norms = [np.linalg.norm(ridge_fit(Q, y, lam)) for lam in lams]
    assert all(b <= a + 1e-10 for a, b in zip(norms, norms[1:]))


def test_cv_noiseless_picks_small_lambda():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((60, 3))
    beta = np.array([1.0, -2.0, 0.5])
    y = X @ beta
    grid = np.geomspace(1e-8, 1e2, 25)
    fit = ridge_cv(X, y, lambda_grid=grid, k=5, seed=0)
    pred_err = float(((y - X @ fit.beta) ** 2).mean())
    assert pred_err < 1e-6
    assert fit.lambda_ridge <= grid[5]


def test_cv_pure_noise_prefers_heavy_shrinkage():
    """With y independent of x, large penalties win most of the time."""
    grid = np.geomspace(1e-4, 1e4, 20)
    wins = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((40, 1))
        y = rng.standard_normal(40)
        fit = ridge_cv(X, y, lambda_grid=grid, k=4, seed=seed)
        if fit.lambda_ridge >= grid[10]:
            wins += 1
    assert wins > 10


def test_cv_single_point_grid():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((12, 2))
    y = rng.standard_normal(12)
    fit = ridge_cv(X, y, lambda_grid=np.array([3.0]), k=3, seed=0)
    assert fit.lambda_ridge == 3.0


def test_cv_deterministic():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((30, 3))
    y = rng.standard_normal(30)
    a = ridge_cv(X, y, k=5, seed=42)
    b = ridge_cv(X, y, k=5, seed=42)
    assert a.lambda_ridge == b.lambda_ridge
    assert np.array_equal(a.beta, b.beta)


def test_default_grid_positive_geometric():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((20, 4))
    grid = default_ridge_grid(X)
    assert len(grid) == 30
    assert (grid > 0).all()
    ratios = grid[1:] / grid[:-1]
    assert np.allclose(ratios, ratios[0])
