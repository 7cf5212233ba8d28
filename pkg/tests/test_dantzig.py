import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from noisereg import (DantzigProblem, LpSolveError, ScalingMatrix,
                      build_dantzig_lp, dantzig_path, default_lambda_grid,
                      solve_lp, standardize)


def standardized(rng, n, p):
    X = rng.standard_normal((n, p))
    y = X @ (rng.standard_normal(p) * (rng.random(p) < 0.5)) \
        + 0.3 * rng.standard_normal(n)
    std = standardize(X, y)
    return std.X, std.y


def enumerate_lp(c, A, b):
    """Brute-force LP oracle: min c'x s.t. Ax <= b, x >= 0.

    Enumerates every vertex (each choice of n active constraints among the
    inequality rows and the nonnegativity bounds) and returns the best
    feasible objective.  Only usable for tiny problems.
    """
    m, n = A.shape
    rows = np.vstack([A, -np.eye(n)])
    rhs = np.concatenate([b, np.zeros(n)])
    best = np.inf
    best_x = None
    for combo in itertools.combinations(range(m + n), n):
        M = rows[list(combo)]
        try:
            x = np.linalg.solve(M, rhs[list(combo)])
        except np.linalg.LinAlgError:
            continue
        if (x >= -1e-9).all() and (A @ x <= b + 1e-9).all():
            obj = float(c @ x)
            if obj < best:
                best, best_x = obj, x
    return best_x, best


def split_lp(lp):
    """Standard-form data with beta split into positive/negative parts."""
    p = lp.p
    A = np.hstack([lp.A[:, :p], lp.A[:, p:], -lp.A[:, p:]])
    c = np.concatenate([lp.c[:p], lp.c[p:], -lp.c[p:]])
    return c, A, lp.b


# --- LP construction ---------------------------------------------------------

def test_lp_shape_counts():
    rng = np.random.default_rng(0)
    X, y = standardized(rng, 3, 2)
    lp = build_dantzig_lp(DantzigProblem(X=X, y=y, lam=1.0, sigma_eps=0.5))
    assert lp.A.shape == (8, 4)
    assert lp.b.shape == (8,)


def test_lp_scaled_band_proportional():
    rng = np.random.default_rng(1)
    X, y = standardized(rng, 6, 2)
    D = ScalingMatrix(np.array([2.0, 1.0]))
    lp = build_dantzig_lp(DantzigProblem(X=X, y=y, lam=1.0, sigma_eps=0.5, D=D))
    g = X.T @ y
    band = lp.b[4:6] - g   # rows X'X beta <= X'y + band
    assert band[0] == pytest.approx(2 * band[1])


def test_lp_lambda_zero_normal_equations():
    rng = np.random.default_rng(2)
    X, y = standardized(rng, 10, 3)
    lp = build_dantzig_lp(DantzigProblem(X=X, y=y, lam=0.0, sigma_eps=0.5))
    beta, obj, status = solve_lp(lp)
    assert status == "optimal"
    bls, *_ = np.linalg.lstsq(X, y, rcond=None)
    assert np.abs(beta - bls).max() < 1e-8


def test_scaled_identity_matches_unscaled_bitwise():
    rng = np.random.default_rng(3)
    X, y = standardized(rng, 8, 3)
    plain = build_dantzig_lp(DantzigProblem(X=X, y=y, lam=0.7, sigma_eps=0.4))
    ident = build_dantzig_lp(DantzigProblem(X=X, y=y, lam=0.7, sigma_eps=0.4,
                                            D=ScalingMatrix.identity(3)))
    assert np.array_equal(plain.A, ident.A)
    assert np.array_equal(plain.b, ident.b)
    assert np.array_equal(plain.c, ident.c)


# --- solver ------------------------------------------------------------------

def test_solve_trivial_min_x():
    # minimize x subject to x >= 1, posed as -x <= -1 over (alpha, beta)=(x, t)
    lp_c = np.array([1.0, 0.0, 0.0])
    A = np.array([[-1.0, 0.0, 0.0]])
    b = np.array([-1.0])
    from noisereg._backend import simplex_solve
    x, obj, code = simplex_solve(A, b, lp_c)
    assert code == 0
    assert obj == pytest.approx(1.0, abs=1e-9)


def test_solve_matches_enumeration_oracle_p2():
    """Dense simplex vs exhaustive vertex enumeration, p = 2."""
    rng = np.random.default_rng(4)
    for _ in range(25):
        X, y = standardized(rng, 6, 2)
        lam_sig = 0.5 * np.abs(X.T @ y).max()
        lp = build_dantzig_lp(DantzigProblem(X=X, y=y, lam=lam_sig, sigma_eps=1.0))
        beta, obj, status = solve_lp(lp)
        assert status == "optimal"
        c, A, b = split_lp(lp)
        _, obj_ref = enumerate_lp(c, A, b)
        assert obj == pytest.approx(obj_ref, abs=1e-7)


def test_solve_matches_linprog_oracle():
    rng = np.random.default_rng(5)
    for _ in range(25):
        p = int(rng.integers(2, 7))
        X, y = standardized(rng, int(rng.integers(p + 2, 12)), p)
        lam_sig = float(rng.random() * 0.8 + 0.1) * np.abs(X.T @ y).max()
        lp = build_dantzig_lp(DantzigProblem(X=X, y=y, lam=lam_sig, sigma_eps=1.0))
        beta, obj, status = solve_lp(lp)
        assert status == "optimal"
        c, A, b = split_lp(lp)
        ref = linprog(c, A_ub=A, b_ub=b, method="highs")
        assert ref.status == 0
        assert obj == pytest.approx(ref.fun, abs=1e-7)


def test_feasibility_of_returned_beta():
    rng = np.random.default_rng(6)
    X, y = standardized(rng, 10, 4)
    lam_sig = 0.3 * np.abs(X.T @ y).max()
    lp = build_dantzig_lp(DantzigProblem(X=X, y=y, lam=lam_sig, sigma_eps=1.0))
    beta, _, status = solve_lp(lp)
    assert status == "optimal"
    assert np.abs(X.T @ (y - X @ beta)).max() <= lam_sig + 1e-7


# --- path --------------------------------------------------------------------

def test_path_zero_at_large_lambda():
    rng = np.random.default_rng(7)
    X, y = standardized(rng, 10, 3)
    top = np.abs(X.T @ y).max()
    path = dantzig_path(X, y, sigma_eps=1.0, lambda_grid=np.array([top * 1.01]))
    assert len(path) == 1
    assert np.array_equal(path.final.beta, np.zeros(3))


def test_path_single_grid_point():
    rng = np.random.default_rng(8)
    X, y = standardized(rng, 10, 3)
    path = dantzig_path(X, y, sigma_eps=1.0,
                        lambda_grid=np.array([0.5 * np.abs(X.T @ y).max()]))
    assert len(path) == 1


def test_path_l1_monotone_in_lambda():
    rng = np.random.default_rng(9)
    X, y = standardized(rng, 15, 4)
    grid = default_lambda_grid(X, y, sigma_eps=1.0, num=12)
    path = dantzig_path(X, y, sigma_eps=1.0, lambda_grid=grid)
    l1 = [s.l1_norm for s in path.steps]
    assert all(b >= a - 1e-7 for a, b in zip(l1, l1[1:]))  # lambda decreasing


def test_path_rejects_bad_grid():
    rng = np.random.default_rng(10)
    X, y = standardized(rng, 10, 3)
    with pytest.raises(ValueError):
        dantzig_path(X, y, sigma_eps=1.0, lambda_grid=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        dantzig_path(X, y, sigma_eps=1.0, lambda_grid=np.array([1.0, -2.0]))


def test_default_grid_shape_and_range():
    rng = np.random.default_rng(11)
    X, y = standardized(rng, 10, 3)
    grid = default_lambda_grid(X, y, sigma_eps=0.5)
    assert len(grid) == 50
    assert grid[0] == pytest.approx(np.abs(X.T @ y).max() / 0.5)
    assert grid[-1] == pytest.approx(grid[0] * 1e-3)
    assert (np.diff(grid) < 0).all()


def test_scaled_path_annotates_uncertainty():
    rng = np.random.default_rng(12)
    X, y = standardized(rng, 12, 3)
    D = ScalingMatrix(np.array([1.5, 0.5, 1.0]))
    grid = default_lambda_grid(X, y, sigma_eps=1.0, num=8)
    path = dantzig_path(X, y, sigma_eps=1.0, lambda_grid=grid, D=D)
    s = path.final
    assert s.uncertainty == pytest.approx(
        float(np.linalg.norm(D.diag * s.beta)), abs=1e-12)


def test_lp_solve_error_status_attached():
    err = LpSolveError("maxiter")
    assert err.status == "maxiter"
