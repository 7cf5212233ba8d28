"""Greedy l1 path solvers: forward stagewise regression and least angle
regression (with the lasso drop modification), plus the design-uncertainty
functional evaluated along a path.
"""

from __future__ import annotations

import warnings
from typing import Optional

import numpy as np

from ._backend import fs_loop
from .data_model import ScalingMatrix, unscale_coefficients
from .paths import PathStep, SolutionPath, make_step

_CMAX_RTOL = 1e-10


class DegenerateActiveSetError(RuntimeError):
    """Active columns became (numerically) collinear.

    The partial path computed before the offending step is attached as
    ``partial_path``.
    """

    def __init__(self, step: int, partial_path: SolutionPath):
        self.step = step
        self.partial_path = partial_path
        super().__init__(f"rank-degenerate active set at path step {step}")


def default_stagewise_gamma(X, y) -> float:
    n = X.shape[0]
    return 1e-3 * float(np.abs(X.T @ y).max()) / n


def forward_stagewise(X, y, gamma: Optional[float] = None, max_steps: int = 100000,
                      corr_tol: float = 1e-4) -> SolutionPath:
    """Forward stagewise regression with fixed step size.

    Each iteration bumps the coefficient most correlated with the residual by
    +-gamma and records a path step; iteration stops when max_j |x_j'r|/n
    falls below corr_tol.  Ties go to the lowest column index.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite values in X or y")
    if gamma is None:
        gamma = default_stagewise_gamma(X, y)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n, p = X.shape

    js, signs, rss, cmax = fs_loop(X, y, gamma, max_steps, corr_tol)
    config = {"solver": "forward_stagewise", "gamma": gamma,
              "max_steps": max_steps, "corr_tol": corr_tol}

    steps = [make_step(np.zeros(p), rss=float(y @ y), lam=float(np.abs(X.T @ y).max()))]
    beta = np.zeros(p)
    for k in range(len(js)):
        beta[js[k]] += gamma * signs[k]
        steps.append(make_step(beta.copy(), rss=rss[k], lam=cmax[k]))
    return SolutionPath(steps=tuple(steps), config=config)


def lars_path(X, y, mode: str = "lasso", max_steps: Optional[int] = None) -> SolutionPath:
    """Least angle regression path from beta = 0 to the least squares end.

    In ``lasso`` mode a coefficient crossing zero is dropped from the active
    set (and excluded from the very next join), which makes the knots trace
    the lasso regularization path.  Each knot stores lambda = max_j |x_j'r|.

    Raises DegenerateActiveSetError when the active Gram matrix becomes
    numerically singular; the partial path is attached to the exception.
    """
    if mode not in ("plain", "lasso"):
        raise ValueError(f"unknown mode {mode!r}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if n < 2:
        raise ValueError("need n >= 2")
    if max_steps is None:
        max_steps = 8 * p + 16

    config = {"solver": "lars", "mode": mode}
    beta = np.zeros(p)
    r = y.copy()
    c = X.T @ r
    C0 = float(np.abs(c).max())
    stop_tol = max(_CMAX_RTOL * C0, 1e-14)
    steps = [make_step(beta.copy(), rss=float(r @ r), lam=C0)]

    active: list = []
    inactive = np.ones(p, dtype=bool)
    just_dropped = False

    for step_no in range(1, max_steps + 1):
        C = float(np.abs(c).max())
        if C <= stop_tol:
            break
        if not just_dropped:
            if not inactive.any():
                break
            cand = np.nonzero(inactive)[0]
            j = int(cand[np.argmax(np.abs(c[cand]))])
            active.append(j)
            inactive[j] = False
        just_dropped = False

        A_idx = np.array(active)
        s_A = np.sign(c[A_idx])
        XA = X[:, A_idx]
        G = XA.T @ XA
        # relative conditioning guard before trusting the solve
        try:
            w_bar = np.linalg.solve(G, s_A)
        except np.linalg.LinAlgError:
            w_bar = None
        if w_bar is None or float(s_A @ w_bar) <= 0 or _ill_conditioned(G):
            raise DegenerateActiveSetError(
                step_no, SolutionPath(steps=tuple(steps), config=config))
        AA = 1.0 / np.sqrt(float(s_A @ w_bar))
        w = AA * w_bar
        u = XA @ w                       # equiangular direction, ||u|| = 1
        a = X.T @ u

        # distance to the least squares end of the current direction
        gamma = C / AA
        event = "end"
        if inactive.any():
            cand = np.nonzero(inactive)[0]
            with np.errstate(divide="ignore", invalid="ignore"):
                g1 = (C - c[cand]) / (AA - a[cand])
                g2 = (C + c[cand]) / (AA + a[cand])
            g_join = np.inf
            for g in np.concatenate([g1, g2]):
                if np.isfinite(g) and 1e-12 < g < g_join:
                    g_join = g
            if g_join < gamma * (1 - 1e-12):
                gamma = g_join
                event = "join"

        drop_pos = None
        if mode == "lasso":
            with np.errstate(divide="ignore", invalid="ignore"):
                g_drop_all = -beta[A_idx] / w
            g_drop = np.inf
            for k, g in enumerate(g_drop_all):
                if np.isfinite(g) and 1e-12 < g < g_drop:
                    g_drop = g
                    drop_pos = k
            if g_drop < gamma * (1 - 1e-12):
                gamma = g_drop
                event = "drop"
            else:
                drop_pos = None

        beta[A_idx] += gamma * w
        r -= gamma * u
        c -= gamma * a

        if event == "drop" and drop_pos is not None:
            j_drop = active[drop_pos]
            beta[j_drop] = 0.0
            active.pop(drop_pos)
            inactive[j_drop] = True
            just_dropped = True

        lam = float(np.abs(c).max())
        steps.append(PathStep(
            beta=beta.copy(),
            active_set=tuple(active),
            rss=float(r @ r),
            l1_norm=float(np.abs(beta).sum()),
            uncertainty=float(np.linalg.norm(beta)),
            lam=lam,
        ))
        if event == "end":
            break
    else:
        warnings.warn("lars_path hit max_steps before reaching the path end")

    return SolutionPath(steps=tuple(steps), config=config)


def _ill_conditioned(G: np.ndarray, rtol: float = 1e-10) -> bool:
    ev = np.linalg.eigvalsh(G)
    return ev[0] <= rtol * max(ev[-1], 1e-300)


def lasso_objective(beta, X, y, lam: float, D: Optional[ScalingMatrix] = None) -> float:
    """0.5*||y - Xb||^2 + lam*||b||_1, or lam*||Db||_1 when a scaling matrix
    is supplied (the generalized form arising from design scaling)."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    beta = np.asarray(beta, dtype=np.float64)
    resid = np.asarray(y, dtype=np.float64) - np.asarray(X, dtype=np.float64) @ beta
    penalty = np.abs(beta if D is None else D.diag * beta).sum()
    return 0.5 * float(resid @ resid) + lam * float(penalty)


def path_uncertainty(path: SolutionPath, S: ScalingMatrix,
                     coefficients_are_scaled: bool = False) -> np.ndarray:
    """||S b||_2 per path step, with b mapped to the original design scale.

    When the path was fit on an S-scaled design and S is passed here, the
    result collapses to the plain coefficient norm ||b'||_2 at every step:
    uncertainty growth on the scaled design is isotropic.
    """
    out = np.empty(len(path.steps))
    for k, s in enumerate(path.steps):
        b = s.beta
        if coefficients_are_scaled:
            b = unscale_coefficients(b, S)
        if b.shape[0] != S.diag.shape[0]:
            raise ValueError("scaling matrix does not match coefficient length")
        out[k] = np.linalg.norm(S.diag * b)
    return out
