"""Nested k-fold cross validation with train-only variance estimation and
uncertainty scaling.

Per fold: noise variances are estimated by ANOVA on the training replicates
only, the scaling matrix is built from those estimates, training data are
standardized and (optionally) scaled, a path solver is fit, and the test fold
is pushed through the training-set transforms before prediction.  Errors are
averaged over outer_loops repetitions of the k-fold split so that
outer_loops * k models are validated in total.

Paths are aligned across folds by step index (knot index for FS/LARS, grid
index for the Dantzig sweep); shorter paths are extended by holding their
final step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data_model import (ReplicatedDataset, ScalingMatrix, apply_scaling,
                         collapse_replicates, standardize,
                         unscale_coefficients)
from .dantzig import LpSolveError, dantzig_path, default_lambda_grid
from .pursuit import DegenerateActiveSetError, forward_stagewise, lars_path
from .ridge import ridge_cv
from .variance import AllZeroUncertaintyError, anova_components, scaling_from_variances

METHODS = ("fs", "lars", "dantzig", "ridge_all")
SUPPORT_TOL = 1e-8


def kfold_assignments(n: int, k: int, seed: int, loop: int = 0) -> np.ndarray:
    """Deterministic fold index per row; fold sizes differ by at most one."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < k:
        raise ValueError("fewer samples than folds")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(loop,))
    rng = np.random.Generator(np.random.Philox(ss))
    perm = rng.permutation(n)
    assign = np.empty(n, dtype=np.int64)
    for f, chunk in enumerate(np.array_split(perm, k)):
        assign[chunk] = f
    return assign


@dataclass(frozen=True)
class CvPlan:
    """Sample-level fold assignment for every outer loop.

    Replicates always travel with their sample, so they can never be split
    across folds.
    """

    k: int
    outer_loops: int
    assignments: np.ndarray  # (outer_loops, n)
    seed: int

    @property
    def n(self) -> int:
        return self.assignments.shape[1]

    @property
    def n_models(self) -> int:
        return self.k * self.outer_loops


def make_folds(ds: ReplicatedDataset, k: int, outer_loops: Optional[int] = None,
               seed: int = 0) -> CvPlan:
    """Uniform random sample-level partition, repeated outer_loops times.

    outer_loops defaults to round(100/k) so that 100 models get validated.
    """
    if outer_loops is None:
        outer_loops = int(round(100 / k))
    if outer_loops < 1:
        raise ValueError("outer_loops must be >= 1")
    assignments = np.stack(
        [kfold_assignments(ds.n, k, seed, loop) for loop in range(outer_loops)]
    )
    return CvPlan(k=k, outer_loops=outer_loops, assignments=assignments, seed=seed)


@dataclass
class CvResult:
    msep_curve: np.ndarray
    se_curve: np.ndarray
    uncertainty_curve: np.ndarray
    nonzeros_curve: np.ndarray
    optimal_index: int
    selected_support: tuple
    nonzero_count: int
    n_models: int
    failed_models: int
    unreliable: bool
    msep_refit: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


def select_optimal(res) -> int:
    """Index of minimum mean MSEP; ties break toward the sparser (smaller)
    index."""
    curve = res.msep_curve if isinstance(res, CvResult) else np.asarray(res)
    if curve.size == 0:
        raise ValueError("empty MSEP curve")
    return int(np.argmin(curve))


def selection_agreement(support_a, support_b):
    """(fraction of a in b, fraction of b in a, Jaccard index)."""
    a, b = set(support_a), set(support_b)
    if not a and not b:
        return 1.0, 1.0, 1.0
    frac_a = len(a & b) / len(a) if a else 1.0
    frac_b = len(a & b) / len(b) if b else 1.0
    union = len(a | b)
    return frac_a, frac_b, (len(a & b) / union if union else 1.0)


def _fold_scaling(ds: ReplicatedDataset, train_idx, column_sds, floor_rel,
                  override: Optional[ScalingMatrix]):
    """Scaling matrix on the standardized-design scale, or None when the
    training replicates carry no usable noise estimate.

    An explicit override is taken as already living on the standardized
    scale; estimated variances are divided by the training column variances
    to get there."""
    if override is not None:
        return override
    if ds.r < 2:
        return None
    reps = ds.design_replicates[train_idx]
    s_dsq = np.array([
        anova_components(reps[:, :, j]).s_delta_sq for j in range(ds.p)
    ])
    try:
        return scaling_from_variances(s_dsq / column_sds ** 2, floor_rel=floor_rel)
    except AllZeroUncertaintyError:
        return None


def _fit_path(method, X_fit, y, cfg, shared, D_for_band):
    if method == "fs":
        return forward_stagewise(
            X_fit, y,
            gamma=cfg.get("gamma"),
            max_steps=cfg.get("max_steps", 100000),
            corr_tol=cfg.get("corr_tol", 1e-4),
        )
    if method == "lars":
        try:
            return lars_path(X_fit, y, mode=cfg.get("lars_mode", "lasso"))
        except DegenerateActiveSetError as exc:
            return exc.partial_path  # keep the valid prefix
    if method == "dantzig":
        return dantzig_path(X_fit, y, shared["sigma_eps"],
                            lambda_grid=shared["grid"], D=D_for_band)
    raise ValueError(f"unknown method {method!r}")


def _fit_one_model(ds, train_idx, test_idx, method, scaled, cfg, shared):
    """Fit on one training fold and score every path step on the test fold.

    Returns per-step squared prediction error, uncertainty, nonzero counts,
    the per-step coefficient supports, and the scaling diagonal in use.
    """
    sub = ds.subset(train_idx)
    design_tr, resp_tr = collapse_replicates(sub)
    std = standardize(design_tr, resp_tr)
    D = _fold_scaling(ds, train_idx, std.column_sds,
                      cfg.get("floor_rel", 1e-6), cfg.get("scaling"))
    if scaled and D is None:
        raise AllZeroUncertaintyError(
            "scaled run requested but no uncertainty estimate is available")

    if test_idx is not None:
        sub_te = ds.subset(test_idx)
        design_te, resp_te = collapse_replicates(sub_te)
        Xte, yte = std.transform(design_te, resp_te)
    else:
        Xte = yte = None

    if method == "ridge_all":
        fit = ridge_cv(std.X, std.y,
                       lambda_grid=cfg.get("ridge_grid"),
                       k=cfg.get("ridge_k", 5),
                       seed=cfg.get("ridge_seed", 0))
        betas = fit.beta[None, :]
    else:
        if scaled and method in ("fs", "lars"):
            X_fit = apply_scaling(std.X, D)
        else:
            X_fit = std.X
        path = _fit_path(method, X_fit, std.y, cfg, shared,
                         D if (scaled and method == "dantzig") else None)
        betas = path.betas
        if scaled and method in ("fs", "lars"):
            betas = betas / D.diag  # back to the standardized design scale

    S_anno = D if D is not None else ScalingMatrix.identity(ds.p)
    unc = np.linalg.norm(betas * S_anno.diag, axis=1)
    nz = (np.abs(betas) > SUPPORT_TOL).sum(axis=1)
    supports = [tuple(np.nonzero(np.abs(b) > SUPPORT_TOL)[0].tolist()) for b in betas]
    if Xte is not None:
        resid = yte[None, :] - betas @ Xte.T
        sqerr = (resid ** 2).mean(axis=1)
    else:
        sqerr = None
    return {
        "sqerr": sqerr,
        "unc": unc,
        "nz": nz.astype(np.float64),
        "supports": supports,
        "betas": betas,
        "D_diag": None if D is None else D.diag.copy(),
        "train": (std.X, std.y),
        "test": (Xte, yte),
    }


def _extend(arr, length):
    if len(arr) >= length:
        return np.asarray(arr[:length], dtype=np.float64)
    return np.concatenate([arr, np.full(length - len(arr), arr[-1])])


def nested_kfold_cv(ds: ReplicatedDataset, plan: CvPlan, method: str = "lars",
                    scaled: bool = False, refit_ridge: bool = False,
                    config: Optional[dict] = None) -> CvResult:
    """Run the full nested CV protocol and aggregate MSEP/uncertainty curves.

    The selected support is read off a final fit on all samples at the
    CV-optimal step.  With refit_ridge, every validated model is additionally
    refit by cross-validated ridge on its support at the optimal step and the
    resulting MSEP is reported as msep_refit.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if plan.n != ds.n:
        raise ValueError("plan does not match dataset")
    cfg = dict(config or {})

    shared = {}
    if method == "dantzig":
        # one grid for all folds so paths align by grid index
        design, resp = collapse_replicates(ds)
        std_full = standardize(design, resp)
        sigma_eps = cfg.get("sigma_eps")
        if sigma_eps is None:
            if ds.r_y < 2:
                raise ValueError("sigma_eps required when the response is unreplicated")
            est = anova_components(ds.response_replicates)
            sigma_eps = float(np.sqrt(est.s_delta_sq)) / std_full.y_sd
            if sigma_eps <= 0:
                raise ValueError("estimated sigma_eps is zero; pass sigma_eps explicitly")
        grid = cfg.get("lambda_grid")
        if grid is None:
            grid = default_lambda_grid(std_full.X, std_full.y, sigma_eps,
                                       num=cfg.get("n_lambda", 50))
        shared = {"sigma_eps": float(sigma_eps), "grid": np.asarray(grid, dtype=np.float64)}

    records = []
    fold_ids = []
    failed = 0
    for loop in range(plan.outer_loops):
        assign = plan.assignments[loop]
        for fold in range(plan.k):
            test_idx = np.nonzero(assign == fold)[0]
            train_idx = np.nonzero(assign != fold)[0]
            try:
                rec = _fit_one_model(ds, train_idx, test_idx, method, scaled, cfg, shared)
            except (LpSolveError, AllZeroUncertaintyError, np.linalg.LinAlgError,
                    ValueError) as exc:
                if scaled and isinstance(exc, AllZeroUncertaintyError):
                    raise
                failed += 1
                continue
            records.append(rec)
            fold_ids.append((loop, fold))

    if not records:
        raise RuntimeError("every fold failed; no models validated")
    n_models = len(records)
    length = max(len(r["sqerr"]) for r in records)
    sq = np.stack([_extend(r["sqerr"], length) for r in records])
    un = np.stack([_extend(r["unc"], length) for r in records])
    nz = np.stack([_extend(r["nz"], length) for r in records])
    msep_curve = sq.mean(axis=0)
    se_curve = (sq.std(axis=0, ddof=1) / np.sqrt(n_models)) if n_models > 1 \
        else np.zeros(length)
    optimal = int(np.argmin(msep_curve))

    # support from a fit on all samples at the CV-optimal step
    full = _fit_one_model(ds, np.arange(ds.n), None, method, scaled, cfg, shared)
    full_step = min(optimal, len(full["supports"]) - 1)
    selected_support = full["supports"][full_step]

    msep_refit = None
    if refit_ridge:
        # the CV-selected variables become the input to cross-validated
        # ridge, re-estimated per training fold and scored on its test fold
        sup = list(selected_support)
        errs = []
        for i, rec in enumerate(records):
            Xtr, ytr = rec["train"]
            Xte, yte = rec["test"]
            if not sup:
                errs.append(float((yte ** 2).mean()))
                continue
            fit = ridge_cv(Xtr[:, sup], ytr,
                           lambda_grid=cfg.get("ridge_grid"),
                           k=cfg.get("ridge_k", 5),
                           seed=plan.seed * 1000003 + i,
                           support=sup)
            errs.append(float(((yte - Xte[:, sup] @ fit.beta) ** 2).mean()))
        msep_refit = float(np.mean(errs))

    total = plan.n_models
    return CvResult(
        msep_curve=msep_curve,
        se_curve=se_curve,
        uncertainty_curve=un.mean(axis=0),
        nonzeros_curve=nz.mean(axis=0),
        optimal_index=optimal,
        selected_support=tuple(selected_support),
        nonzero_count=len(selected_support),
        n_models=n_models,
        failed_models=failed,
        unreliable=(failed > 0.1 * total),
        msep_refit=msep_refit,
        diagnostics={
            "fold_ids": fold_ids,
            "fold_scaling_diag": [r["D_diag"] for r in records],
        },
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def cvresult_to_json(res: CvResult) -> str:
    doc = {
        "msep_curve": list(res.msep_curve),
        "se_curve": list(res.se_curve),
        "uncertainty_curve": list(res.uncertainty_curve),
        "nonzeros_curve": list(res.nonzeros_curve),
        "optimal_index": res.optimal_index,
        "selected_support": list(res.selected_support),
        "nonzero_count": res.nonzero_count,
        "n_models": res.n_models,
        "failed_models": res.failed_models,
        "unreliable": res.unreliable,
        "msep_refit": res.msep_refit,
        "msep_at_optimum": float(res.msep_curve[res.optimal_index]),
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def curves_to_csv(res: CvResult, fileobj) -> None:
    fileobj.write("step,msep,se,uncertainty,nonzeros\n")
    for i in range(len(res.msep_curve)):
        fileobj.write(",".join([
            str(i),
            _fmt(res.msep_curve[i]),
            _fmt(res.se_curve[i]),
            _fmt(res.uncertainty_curve[i]),
            _fmt(res.nonzeros_curve[i]),
        ]) + "\n")
