# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot numerical kernels.

Must stay in exact behavioral sync with ``_kernels_py`` — same pivoting
rules, same tie breaks, same status codes.  The test suite cross-checks the
two backends on random inputs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

BACKEND_NAME = "cython"

cdef enum:
    _OPTIMAL = 0
    _INFEASIBLE = 1
    _UNBOUNDED = 2
    _MAXITER = 3

OPTIMAL = _OPTIMAL
INFEASIBLE = _INFEASIBLE
UNBOUNDED = _UNBOUNDED
MAXITER = _MAXITER


cdef void _pivot_c(double[:, ::1] T, long long[::1] basis, Py_ssize_t i,
                   Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t rows = T.shape[0]
    cdef Py_ssize_t cols = T.shape[1]
    cdef Py_ssize_t r, k
    cdef double piv = T[i, j]
    cdef double f
    for k in range(cols):
        T[i, k] /= piv
    for r in range(rows):
        if r == i:
            continue
        f = T[r, j]
        if f != 0.0:
            for k in range(cols):
                T[r, k] -= f * T[i, k]
    basis[i] = j


cdef int _bland_loop_c(double[:, ::1] T, long long[::1] basis,
                       Py_ssize_t ncols, double tol, long max_iter) noexcept nogil:
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t last = T.shape[1] - 1
    cdef Py_ssize_t i, j, k, best_i
    cdef long it
    cdef double rmin, ratio, bound
    cdef bint any_pos
    for it in range(max_iter):
        j = -1
        for k in range(ncols):
            if T[m, k] < -tol:
                j = k
                break
        if j < 0:
            return _OPTIMAL
        any_pos = False
        rmin = INFINITY
        for i in range(m):
            if T[i, j] > tol:
                any_pos = True
                ratio = T[i, last] / T[i, j]
                if ratio < rmin:
                    rmin = ratio
        if not any_pos:
            return _UNBOUNDED
        bound = rmin * (1.0 + 1e-12) + 1e-15
        best_i = -1
        for i in range(m):
            if T[i, j] > tol:
                ratio = T[i, last] / T[i, j]
                if ratio <= bound:
                    if best_i < 0 or basis[i] < basis[best_i]:
                        best_i = i
        _pivot_c(T, basis, best_i, j)
    return _MAXITER


def simplex_solve(A, b, c, double tol=1e-9, long max_iter=0):
    """Two-phase dense simplex for min c'x s.t. Ax <= b, x >= 0.

    Returns (x, objective, status).  Rows with negative right-hand sides get
    phase-1 artificial variables.
    """
    cdef cnp.ndarray[double, ndim=2] A_arr = np.ascontiguousarray(A, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] b_arr = np.asarray(b, dtype=np.float64).copy()
    cdef cnp.ndarray[double, ndim=1] c_arr = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t m = A_arr.shape[0]
    cdef Py_ssize_t n = A_arr.shape[1]
    if max_iter <= 0:
        max_iter = 200 * (m + n + 10)

    flip = b_arr < 0
    cdef Py_ssize_t k_art = int(flip.sum())
    cdef Py_ssize_t ncols = n + m
    T_arr = np.zeros((m + 1, ncols + k_art + 1))
    T_arr[:m, :n] = np.where(flip[:, None], -A_arr, A_arr)
    T_arr[:m, n:ncols] = np.diag(np.where(flip, -1.0, 1.0))
    T_arr[:m, ncols + k_art] = np.where(flip, -b_arr, b_arr)
    basis_arr = np.empty(m, dtype=np.int64)
    basis_arr[~flip] = n + np.nonzero(~flip)[0]
    art_cols = ncols + np.arange(k_art)
    art_rows = np.nonzero(flip)[0]
    for r, cidx in zip(art_rows, art_cols):
        T_arr[r, cidx] = 1.0
        basis_arr[r] = cidx

    cdef double[:, ::1] T = T_arr
    cdef long long[::1] basis = basis_arr
    cdef int status
    cdef Py_ssize_t i, j

    if k_art > 0:
        T_arr[m, :] = -T_arr[art_rows].sum(axis=0)
        T_arr[m, art_cols] = 0.0
        status = _bland_loop_c(T, basis, ncols, tol, max_iter)
        if status != OPTIMAL or -T_arr[m, ncols + k_art] > 1e3 * tol:
            if status == OPTIMAL or status == UNBOUNDED:
                return np.zeros(n), 0.0, INFEASIBLE
            return np.zeros(n), 0.0, status
        drop_rows = []
        for i in range(m):
            if basis_arr[i] >= ncols:
                row = np.abs(T_arr[i, :ncols])
                j = int(np.argmax(row))
                if row[j] > tol:
                    _pivot_c(T, basis, i, j)
                else:
                    drop_rows.append(i)
        if drop_rows:
            keep = np.setdiff1d(np.arange(m), drop_rows)
            T_arr = np.ascontiguousarray(np.vstack([T_arr[keep], T_arr[m:m + 1]]))
            basis_arr = np.ascontiguousarray(basis_arr[keep])
            m = len(keep)
            T = T_arr
            basis = basis_arr

    cost = np.zeros(T_arr.shape[1])
    cost[:n] = c_arr
    T_arr[m, :] = cost
    for i in range(m):
        if cost[basis_arr[i]] != 0.0:
            T_arr[m, :] -= cost[basis_arr[i]] * T_arr[i]
    status = _bland_loop_c(T, basis, ncols, tol, max_iter)
    x = np.zeros(n)
    in_x = basis_arr < n
    x[basis_arr[in_x]] = T_arr[:m, T_arr.shape[1] - 1][in_x]
    return x, float(c_arr @ x), status


def cd_lasso(X, y, double lam, double tol=1e-12, long max_sweeps=100000,
             beta0=None):
    """Cyclic coordinate descent for min 0.5*||y - Xb||^2 + lam*||b||_1.

    Returns (beta, n_sweeps).  Convergence is declared when no coordinate
    moves by more than tol within a full sweep.
    """
    cdef cnp.ndarray[double, ndim=2] X_arr = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] y_arr = np.asarray(y, dtype=np.float64)
    cdef Py_ssize_t n = X_arr.shape[0]
    cdef Py_ssize_t p = X_arr.shape[1]
    if beta0 is None:
        beta_arr = np.zeros(p)
    else:
        beta_arr = np.asarray(beta0, dtype=np.float64).copy()
    cdef cnp.ndarray[double, ndim=1] beta = beta_arr
    cdef cnp.ndarray[double, ndim=1] sqnorm = np.einsum("ij,ij->j", X_arr, X_arr)
    cdef cnp.ndarray[double, ndim=1] r = y_arr - X_arr @ beta

    cdef double[:, ::1] Xv = X_arr
    cdef double[::1] bv = beta
    cdef double[::1] rv = r
    cdef double[::1] sq = sqnorm
    cdef long sweep
    cdef Py_ssize_t i, j
    cdef double delta_max, old, z, new, step

    for sweep in range(1, max_sweeps + 1):
        delta_max = 0.0
        with nogil:
            for j in range(p):
                if sq[j] <= 0.0:
                    continue
                old = bv[j]
                z = 0.0
                for i in range(n):
                    z += Xv[i, j] * rv[i]
                z += sq[j] * old
                if z > lam:
                    new = (z - lam) / sq[j]
                elif z < -lam:
                    new = (z + lam) / sq[j]
                else:
                    new = 0.0
                if new != old:
                    step = new - old
                    for i in range(n):
                        rv[i] -= step * Xv[i, j]
                    bv[j] = new
                    if fabs(step) > delta_max:
                        delta_max = fabs(step)
        if delta_max <= tol:
            return beta, sweep
    return beta, max_sweeps


def fs_loop(X, y, double gamma, long max_steps, double corr_tol):
    """Forward stagewise inner loop.

    Repeatedly bumps the coefficient of the column with the largest absolute
    inner product with the residual.  Returns (js, signs, rss, cmax) arrays,
    one entry per executed step, where cmax[k] is max_j |x_j'r| after step k.
    """
    cdef cnp.ndarray[double, ndim=2] X_arr = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] r = np.asarray(y, dtype=np.float64).copy()
    cdef Py_ssize_t n = X_arr.shape[0]
    cdef Py_ssize_t p = X_arr.shape[1]
    js_arr = np.empty(max_steps, dtype=np.int64)
    signs_arr = np.empty(max_steps)
    rss_arr = np.empty(max_steps)
    cmax_arr = np.empty(max_steps)
    c_arr = np.empty(p)

    cdef double[:, ::1] Xv = X_arr
    cdef double[::1] rv = r
    cdef double[::1] cv = c_arr
    cdef long long[::1] js = js_arr
    cdef double[::1] signs = signs_arr
    cdef double[::1] rss = rss_arr
    cdef double[::1] cmax = cmax_arr
    cdef Py_ssize_t nsteps = 0
    cdef Py_ssize_t i, j, jbest
    cdef long step
    cdef double acc, cm, s, tot

    with nogil:
        for step in range(max_steps):
            cm = -1.0
            jbest = 0
            for j in range(p):
                acc = 0.0
                for i in range(n):
                    acc += Xv[i, j] * rv[i]
                cv[j] = acc
                if fabs(acc) > cm:
                    cm = fabs(acc)
                    jbest = j
            if cm / n < corr_tol:
                break
            s = 1.0 if cv[jbest] > 0 else -1.0
            for i in range(n):
                rv[i] -= gamma * s * Xv[i, jbest]
            js[nsteps] = jbest
            signs[nsteps] = s
            tot = 0.0
            for i in range(n):
                tot += rv[i] * rv[i]
            rss[nsteps] = tot
            cm = 0.0
            for j in range(p):
                acc = 0.0
                for i in range(n):
                    acc += Xv[i, j] * rv[i]
                if fabs(acc) > cm:
                    cm = fabs(acc)
            cmax[nsteps] = cm
            nsteps += 1
    return (js_arr[:nsteps], signs_arr[:nsteps], rss_arr[:nsteps],
            cmax_arr[:nsteps])
