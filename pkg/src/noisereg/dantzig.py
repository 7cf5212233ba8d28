"""Dantzig selector as an explicit linear program, solved with a dense
two-phase simplex.

The unscaled program minimizes 1'a subject to -a <= b <= a and
-sl <= X'(y - Xb) <= sl with s = sigma_eps and l the tuning parameter.  With
a scaling matrix D the objective becomes 1'(Da) and the correlation band is
stretched to +-s*l*D1, which relaxes the residual-correlation requirement on
the noisier coordinates; b stays on the original design scale.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend
from .data_model import ScalingMatrix
from .paths import SolutionPath, make_step, with_uncertainty

SUPPORT_ZERO_TOL = 1e-8


class LpSolveError(RuntimeError):
    def __init__(self, status: str):
        self.status = status
        super().__init__(f"linear program terminated with status {status!r}")


@dataclass(frozen=True)
class DantzigProblem:
    X: np.ndarray
    y: np.ndarray
    lam: float
    sigma_eps: float
    D: Optional[ScalingMatrix] = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("X must be (n, p) with matching response length")
        if self.lam < 0 or self.sigma_eps < 0:
            raise ValueError("lambda and sigma_eps must be nonnegative")
        if self.D is not None and self.D.diag.shape[0] != X.shape[1]:
            raise ValueError("scaling matrix does not match design width")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class LpStandardForm:
    """min c'z subject to A z <= b over z = (alpha, beta), beta free."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    p: int
    blocks: tuple = ()

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        c = np.asarray(self.c, dtype=np.float64)
        if A.shape != (4 * self.p, 2 * self.p) or b.shape != (4 * self.p,):
            raise ValueError("expected 4p constraint rows over 2p variables")
        if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise ValueError("non-finite LP data")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)


def build_dantzig_lp(prob: DantzigProblem) -> LpStandardForm:
    """Assemble the 4p-row inequality form over (alpha, beta)."""
    X, y = prob.X, prob.y
    p = X.shape[1]
    G = X.T @ X
    g = X.T @ y
    d = prob.D.diag if prob.D is not None else np.ones(p)
    band = prob.sigma_eps * prob.lam * d

    I = np.eye(p)
    Z = np.zeros((p, p))
    A = np.vstack([
        np.hstack([-I, I]),    # beta - alpha <= 0
        np.hstack([-I, -I]),   # -beta - alpha <= 0
        np.hstack([Z, G]),     # X'X beta <= X'y + band
        np.hstack([Z, -G]),    # -X'X beta <= -X'y + band
    ])
    b = np.concatenate([np.zeros(2 * p), g + band, band - g])
    c = np.concatenate([d, np.zeros(p)])
    blocks = ("beta <= alpha", "-beta <= alpha",
              "X'(y - X beta) >= -band", "X'(y - X beta) <= band")
    return LpStandardForm(c=c, A=A, b=b, p=p, blocks=blocks)


_STATUS = {0: "optimal", 1: "infeasible", 2: "unbounded", 3: "maxiter"}


def solve_lp(lp: LpStandardForm, tol: float = 1e-9):
    """Solve the assembled program; returns (beta, objective, status).

    alpha >= 0 is implied by the box rows, so alpha enters the simplex
    nonnegative directly while beta is split into positive/negative parts.
    """
    p = lp.p
    A_alpha = lp.A[:, :p]
    A_beta = lp.A[:, p:]
    A_std = np.hstack([A_alpha, A_beta, -A_beta])
    c_std = np.concatenate([lp.c[:p], lp.c[p:], -lp.c[p:]])
    x, obj, code = _backend.simplex_solve(A_std, lp.b, c_std, tol=tol)
    status = _STATUS.get(int(code), "maxiter")
    if status != "optimal":
        return np.zeros(p), float("nan"), status
    beta = x[p:2 * p] - x[2 * p:3 * p]
    return beta, float(obj), status


def default_lambda_grid(X, y, sigma_eps: float, num: int = 50) -> np.ndarray:
    """Geometric grid from the all-zero-feasible lambda down to 1e-3 of it."""
    if sigma_eps <= 0:
        raise ValueError("sigma_eps must be positive to build a lambda grid")
    top = float(np.abs(np.asarray(X).T @ np.asarray(y)).max()) / sigma_eps
    return np.geomspace(top, 1e-3 * top, num)


def dantzig_path(X, y, sigma_eps: float, lambda_grid=None,
                 D: Optional[ScalingMatrix] = None, tol: float = 1e-9) -> SolutionPath:
    """One Dantzig solve per grid value, largest lambda first.

    Near-zero coefficients are snapped to exact zeros for support reporting;
    infeasible grid points (which should not occur for this family) are
    skipped with a warning.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(X, y, sigma_eps)
    lambda_grid = np.asarray(lambda_grid, dtype=np.float64)
    if lambda_grid.size == 0 or (lambda_grid <= 0).any():
        raise ValueError("lambda grid must be positive")
    if lambda_grid.size > 1 and not (np.diff(lambda_grid) < 0).all():
        raise ValueError("lambda grid must be strictly decreasing")

    steps = []
    for lam in lambda_grid:
        prob = DantzigProblem(X=X, y=y, lam=float(lam), sigma_eps=sigma_eps, D=D)
        beta, obj, status = solve_lp(build_dantzig_lp(prob), tol=tol)
        if status != "optimal":
            warnings.warn(f"skipping lambda={lam:g}: LP status {status}")
            continue
        beta = np.where(np.abs(beta) <= SUPPORT_ZERO_TOL, 0.0, beta)
        resid = y - X @ beta
        steps.append(make_step(beta, rss=float(resid @ resid), lam=float(lam)))
    if not steps:
        raise LpSolveError("no feasible grid point")
    config = {"solver": "dantzig", "sigma_eps": sigma_eps,
              "lambda_grid": lambda_grid.tolist(), "scaled_band": D is not None}
    path = SolutionPath(steps=tuple(steps), config=config)
    if D is not None:
        path = with_uncertainty(path, D, coefficients_are_scaled=False)
    return path
