"""Ridge regression refit on a sparse support with cross-validated penalty
selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class RidgeFit:
    support: tuple
    beta: np.ndarray
    lambda_ridge: float

    def predict(self, X_sub: np.ndarray) -> np.ndarray:
        return np.asarray(X_sub) @ self.beta


def ridge_fit(X_sub, y, lambda_ridge: float) -> np.ndarray:
    """(X'X + lam I)^-1 X'y via a linear solve (no explicit inverse).

    lambda_ridge = 0 is allowed only for full-column-rank designs.
    """
    X = np.asarray(X_sub, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if lambda_ridge < 0:
        raise ValueError("lambda_ridge must be nonnegative")
    q = X.shape[1]
    G = X.T @ X + lambda_ridge * np.eye(q)
    if lambda_ridge == 0 and np.linalg.matrix_rank(X) < q:
        raise np.linalg.LinAlgError("singular system at lambda_ridge = 0")
    return np.linalg.solve(G, X.T @ y)


def default_ridge_grid(X_sub, num: int = 30) -> np.ndarray:
    X = np.asarray(X_sub, dtype=np.float64)
    n, q = X.shape
    scale = float(np.einsum("ij,ij->", X, X)) / max(q, 1) / n
    return np.geomspace(1e-4 * scale, 1e4 * scale, num)


def ridge_cv(X_sub, y, lambda_grid=None, k: int = 5, seed: int = 0,
             support: Optional[tuple] = None) -> RidgeFit:
    """Pick the grid penalty minimizing k-fold MSEP, then refit on all rows.

    Rows here are collapsed samples, so plain row folds cannot split
    replicates.
    """
    from .cv import kfold_assignments  # shared fold generator

    X = np.asarray(X_sub, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, q = X.shape
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < k:
        raise ValueError("fewer samples than folds")
    if lambda_grid is None:
        lambda_grid = default_ridge_grid(X)
    lambda_grid = np.asarray(lambda_grid, dtype=np.float64)
    if (lambda_grid <= 0).any():
        raise ValueError("ridge grid must be positive")

    assign = kfold_assignments(n, k, seed)
    msep = np.zeros(lambda_grid.size)
    for fold in range(k):
        test = assign == fold
        train = ~test
        Xtr, ytr = X[train], y[train]
        Xte, yte = X[test], y[test]
        for i, lam in enumerate(lambda_grid):
            b = ridge_fit(Xtr, ytr, lam)
            err = yte - Xte @ b
            msep[i] += float(err @ err)
    msep /= n
    best = int(np.argmin(msep))
    lam = float(lambda_grid[best])
    beta = ridge_fit(X, y, lam)
    if support is None:
        support = tuple(range(q))
    return RidgeFit(support=tuple(int(j) for j in support), beta=beta, lambda_ridge=lam)
