"""Pure numpy implementations of the hot numerical kernels.

These mirror the Cython versions in ``_kernels_cy.pyx`` exactly; the active
implementation is chosen in ``_backend``.  Keep the two files in sync — the
test suite cross-checks them on random inputs.
"""

import numpy as np

BACKEND_NAME = "python"

# status codes shared with the compiled kernel
OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
MAXITER = 3


def _pivot(T, basis, i, j):
    T[i] /= T[i, j]
    col = T[:, j].copy()
    col[i] = 0.0
    T -= np.outer(col, T[i])
    basis[i] = j


def _bland_loop(T, basis, ncols, tol, max_iter):
    """Run simplex pivots on tableau T until optimality.

    Entering/leaving variables follow Bland's rule, which guarantees
    termination on degenerate vertices.  The objective row is T[-1], the
    right-hand side lives in the last column.
    """
    m = T.shape[0] - 1
    for _ in range(max_iter):
        red = T[-1, :ncols]
        entering = np.nonzero(red < -tol)[0]
        if entering.size == 0:
            return OPTIMAL
        j = entering[0]
        col = T[:m, j]
        pos = col > tol
        if not pos.any():
            return UNBOUNDED
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        rmin = ratios.min()
        ties = np.nonzero(ratios <= rmin * (1.0 + 1e-12) + 1e-15)[0]
        i = ties[np.argmin(basis[ties])]
        _pivot(T, basis, i, j)
    return MAXITER


def simplex_solve(A, b, c, tol=1e-9, max_iter=0):
    """Two-phase dense simplex for min c'x s.t. Ax <= b, x >= 0.

    Returns (x, objective, status).  Rows with negative right-hand sides get
    phase-1 artificial variables.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).copy()
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    if max_iter <= 0:
        max_iter = 200 * (m + n + 10)

    flip = b < 0
    k = int(flip.sum())
    ncols = n + m
    T = np.zeros((m + 1, ncols + k + 1))
    T[:m, :n] = np.where(flip[:, None], -A, A)
    T[:m, n:ncols] = np.diag(np.where(flip, -1.0, 1.0))
    T[:m, -1] = np.where(flip, -b, b)
    basis = np.empty(m, dtype=np.int64)
    basis[~flip] = n + np.nonzero(~flip)[0]
    art_cols = ncols + np.arange(k)
    art_rows = np.nonzero(flip)[0]
    for r, cidx in zip(art_rows, art_cols):
        T[r, cidx] = 1.0
        basis[r] = cidx

    if k > 0:
        # phase 1: drive the artificials to zero
        T[-1, :] = -T[art_rows].sum(axis=0)
        T[-1, art_cols] = 0.0
        status = _bland_loop(T, basis, ncols, tol, max_iter)
        if status != OPTIMAL or -T[-1, -1] > 1e3 * tol:
            if status == OPTIMAL or status == UNBOUNDED:
                return np.zeros(n), 0.0, INFEASIBLE
            return np.zeros(n), 0.0, status
        # pivot any leftover degenerate artificials out of the basis
        drop_rows = []
        for i in range(m):
            if basis[i] >= ncols:
                row = np.abs(T[i, :ncols])
                j = int(np.argmax(row))
                if row[j] > tol:
                    _pivot(T, basis, i, j)
                else:
                    drop_rows.append(i)
        if drop_rows:
            keep = np.setdiff1d(np.arange(m), drop_rows)
            T = np.vstack([T[keep], T[-1:]])
            basis = basis[keep]
            m = len(keep)

    # phase 2 objective expressed in the current basis
    cost = np.zeros(T.shape[1])
    cost[:n] = c
    T[-1, :] = cost
    for i in range(m):
        if cost[basis[i]] != 0.0:
            T[-1, :] -= cost[basis[i]] * T[i]
    status = _bland_loop(T, basis, ncols, tol, max_iter)
    x = np.zeros(n)
    in_x = basis < n
    x[basis[in_x]] = T[:m, -1][in_x]
    return x, float(c @ x), status


def cd_lasso(X, y, lam, tol=1e-12, max_sweeps=100000, beta0=None):
    """Cyclic coordinate descent for min 0.5*||y - Xb||^2 + lam*||b||_1.

    Returns (beta, n_sweeps).  Convergence is declared when no coordinate
    moves by more than tol within a full sweep.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    beta = np.zeros(p) if beta0 is None else np.asarray(beta0, dtype=np.float64).copy()
    sqnorm = np.einsum("ij,ij->j", X, X)
    r = y - X @ beta
    for sweep in range(1, max_sweeps + 1):
        delta_max = 0.0
        for j in range(p):
            if sqnorm[j] <= 0.0:
                continue
            old = beta[j]
            z = X[:, j] @ r + sqnorm[j] * old
            new = np.sign(z) * max(abs(z) - lam, 0.0) / sqnorm[j]
            if new != old:
                r -= (new - old) * X[:, j]
                beta[j] = new
                delta_max = max(delta_max, abs(new - old))
        if delta_max <= tol:
            return beta, sweep
    return beta, max_sweeps


def fs_loop(X, y, gamma, max_steps, corr_tol):
    """Forward stagewise inner loop.

    Repeatedly bumps the coefficient of the column with the largest absolute
    inner product with the residual.  Returns (js, signs, rss, cmax) arrays,
    one entry per executed step, where cmax[k] is max_j |x_j'r| after step k.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    r = np.asarray(y, dtype=np.float64).copy()
    n = X.shape[0]
    js = np.empty(max_steps, dtype=np.int64)
    signs = np.empty(max_steps)
    rss = np.empty(max_steps)
    cmax = np.empty(max_steps)
    nsteps = 0
    for _ in range(max_steps):
        c = X.T @ r
        j = int(np.argmax(np.abs(c)))
        cm = abs(c[j])
        if cm / n < corr_tol:
            break
        s = 1.0 if c[j] > 0 else -1.0
        r -= gamma * s * X[:, j]
        js[nsteps] = j
        signs[nsteps] = s
        rss[nsteps] = r @ r
        cmax[nsteps] = np.abs(X.T @ r).max()
        nsteps += 1
    return js[:nsteps], signs[:nsteps], rss[:nsteps], cmax[:nsteps]
