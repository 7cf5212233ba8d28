"""One-way random-effects ANOVA variance components from replicated
measurements, and construction of the uncertainty scaling matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .data_model import ReplicatedDataset, ScalingMatrix


class AllZeroUncertaintyError(ValueError):
    """Every estimated uncertainty variance is zero: there is no scale to
    floor against, so the caller should skip scaling entirely."""


@dataclass(frozen=True)
class AnovaEstimate:
    """Variance decomposition of one replicated variable.

    s_delta_sq is the within-sample (uncertainty) variance, s_nu_sq the
    between-sample (signal) variance; both are method-of-moments estimates,
    the latter clamped at zero.
    """

    s_delta_sq: float
    s_nu_sq: float
    ss_treatment: float
    ss_error: float
    df_treatment: int
    df_error: int


def anova_components(values: np.ndarray) -> AnovaEstimate:
    """Decompose an (n samples, r replicates) matrix into variance components.

    SSTr = sum_i r*(zbar_i - zbar)^2 with n-1 df, SSE = sum_ij (z_ij -
    zbar_i)^2 with n(r-1) df; s_delta^2 = SSE/df_err and s_nu^2 =
    max(0, (SSTr/df_tr - s_delta^2)/r).
    """
    z = np.asarray(values, dtype=np.float64)
    if z.ndim != 2:
        raise ValueError("values must be an (n, r) matrix")
    n, r = z.shape
    if n < 2:
        raise ValueError("need n >= 2 samples for between-sample df")
    if r < 2:
        raise ValueError("need r >= 2 replicates for within-sample df")
    sample_means = z.mean(axis=1)
    grand_mean = z.mean()
    ss_tr = float(r * ((sample_means - grand_mean) ** 2).sum())
    sse = float(((z - sample_means[:, None]) ** 2).sum())
    df_tr = n - 1
    df_err = n * (r - 1)
    s_delta_sq = sse / df_err
    s_nu_sq = max(0.0, (ss_tr / df_tr - s_delta_sq) / r)
    return AnovaEstimate(
        s_delta_sq=s_delta_sq,
        s_nu_sq=s_nu_sq,
        ss_treatment=ss_tr,
        ss_error=sse,
        df_treatment=df_tr,
        df_error=df_err,
    )


def dataset_anova(ds: ReplicatedDataset):
    """Per-predictor ANOVA estimates plus the response estimate (or None when
    the response is unreplicated)."""
    per_var = [anova_components(ds.design_replicates[:, :, j]) for j in range(ds.p)]
    resp = anova_components(ds.response_replicates) if ds.r_y >= 2 else None
    return per_var, resp


def scaling_from_variances(s_delta_sq, floor_rel: float = 1e-6) -> ScalingMatrix:
    """Scaling matrix from raw uncertainty variances.

    Entries are standard deviations s_delta_j, floored at floor_rel times the
    median of the positive ones so near-noiseless variables cannot blow up
    the scaled design.
    """
    var = np.asarray(s_delta_sq, dtype=np.float64)
    if var.ndim != 1 or var.size < 1:
        raise ValueError("need a vector of variances")
    if floor_rel <= 0:
        raise ValueError("floor_rel must be positive")
    if (var < 0).any():
        raise ValueError("variances must be nonnegative")
    sd = np.sqrt(var)
    positive = sd[sd > 0]
    if positive.size == 0:
        raise AllZeroUncertaintyError(
            "all uncertainty variances are zero; skip scaling for this data"
        )
    floor = floor_rel * float(np.median(positive))
    return ScalingMatrix(diag=np.maximum(sd, floor))


def build_scaling_matrix(estimates: Sequence[AnovaEstimate],
                         floor_rel: float = 1e-6) -> ScalingMatrix:
    """Scaling matrix from per-variable ANOVA estimates (entries are standard
    deviations, not variances)."""
    return scaling_from_variances(
        np.array([e.s_delta_sq for e in estimates]), floor_rel=floor_rel
    )
