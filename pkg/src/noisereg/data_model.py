"""Replicated measurement data: ingestion, replicate collapse, standardization
and uncertainty scaling of the design matrix.

Conventions: a dataset holds one design tensor of shape (n samples, r
replicates, p predictors) and a response matrix (n, r_y); the response
replicate count may differ from the design's.  Regression always runs on
per-sample replicate means; raw replicates are kept for variance estimation
only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class IngestError(ValueError):
    """Raised when a replicated CSV cannot be turned into a dataset."""


class ZeroVarianceColumnError(ValueError):
    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} has zero sample variance")


@dataclass(frozen=True)
class ReplicatedDataset:
    """Raw replicated measurements for n samples."""

    design_replicates: np.ndarray   # (n, r, p)
    response_replicates: np.ndarray  # (n, r_y)
    sample_ids: tuple

    def __post_init__(self):
        d = np.asarray(self.design_replicates, dtype=np.float64)
        resp = np.asarray(self.response_replicates, dtype=np.float64)
        if d.ndim != 3:
            raise ValueError("design_replicates must have shape (n, r, p)")
        if resp.ndim != 2 or resp.shape[0] != d.shape[0]:
            raise ValueError("response_replicates must have shape (n, r_y)")
        if d.shape[1] < 1 or resp.shape[1] < 1:
            raise ValueError("need at least one replicate")
        if not np.isfinite(d).all() or not np.isfinite(resp).all():
            raise ValueError("missing or non-finite values in dataset")
        if len(self.sample_ids) != d.shape[0]:
            raise ValueError("sample_ids length must equal sample count")
        object.__setattr__(self, "design_replicates", d)
        object.__setattr__(self, "response_replicates", resp)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))

    @property
    def n(self) -> int:
        return self.design_replicates.shape[0]

    @property
    def r(self) -> int:
        return self.design_replicates.shape[1]

    @property
    def p(self) -> int:
        return self.design_replicates.shape[2]

    @property
    def r_y(self) -> int:
        return self.response_replicates.shape[1]

    def subset(self, indices) -> "ReplicatedDataset":
        """Dataset restricted to the given sample indices (replicates intact)."""
        idx = np.asarray(indices, dtype=np.int64)
        return ReplicatedDataset(
            design_replicates=self.design_replicates[idx],
            response_replicates=self.response_replicates[idx],
            sample_ids=tuple(self.sample_ids[i] for i in idx),
        )


@dataclass(frozen=True)
class StandardizedDesign:
    """Centered, unit-sample-variance design and response with the statistics
    needed to transform new data and to undo the transform."""

    X: np.ndarray
    y: np.ndarray
    column_means: np.ndarray
    column_sds: np.ndarray
    y_mean: float
    y_sd: float

    def transform(self, design: np.ndarray, response: Optional[np.ndarray] = None):
        """Apply the recorded centering/scaling to new rows."""
        Xs = (np.asarray(design, dtype=np.float64) - self.column_means) / self.column_sds
        if response is None:
            return Xs
        ys = (np.asarray(response, dtype=np.float64) - self.y_mean) / self.y_sd
        return Xs, ys


@dataclass(frozen=True)
class ScalingMatrix:
    """Diagonal positive matrix of per-variable uncertainty standard deviations."""

    diag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=np.float64)
        if d.ndim != 1:
            raise ValueError("diag must be a vector")
        if not (np.isfinite(d).all() and (d > 0).all()):
            raise ValueError("scaling entries must be strictly positive and finite")
        object.__setattr__(self, "diag", d)

    @classmethod
    def identity(cls, p: int) -> "ScalingMatrix":
        return cls(diag=np.ones(p))


@dataclass(frozen=True)
class CsvSchema:
    """Column roles for long-form replicated CSV (one row per sample-replicate)."""

    sample: str
    replicate: str
    response: str
    predictors: Optional[Sequence[str]] = None  # None = all remaining columns

    def resolve_predictors(self, header: Sequence[str]) -> list:
        if self.predictors is not None:
            missing = [c for c in self.predictors if c not in header]
            if missing:
                raise IngestError(f"predictor columns not in file: {missing}")
            return list(self.predictors)
        reserved = {self.sample, self.replicate, self.response}
        cols = [c for c in header if c not in reserved]
        if not cols:
            raise IngestError("no predictor columns in file")
        return cols


def load_replicated_csv(path, schema: CsvSchema) -> ReplicatedDataset:
    """Read a long-form replicated CSV into a ReplicatedDataset.

    Rows are grouped by sample id; every sample must carry the same number of
    replicates (ragged counts are rejected) and every cell must parse as a
    decimal number.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError("file is empty (header row required)")
        header = list(reader.fieldnames)
        for col in (schema.sample, schema.replicate, schema.response):
            if col not in header:
                raise IngestError(f"required column {col!r} not in header")
        predictors = schema.resolve_predictors(header)

        groups: dict = {}
        seen_keys = set()
        for lineno, row in enumerate(reader, start=2):
            sid = row[schema.sample]
            rid = row[schema.replicate]
            key = (sid, rid)
            if key in seen_keys:
                raise IngestError(f"duplicate (sample, replicate) key {key} at line {lineno}")
            seen_keys.add(key)
            vals = np.empty(len(predictors))
            for k, col in enumerate(predictors + [schema.response]):
                cell = row[col]
                try:
                    v = float(cell)
                except (TypeError, ValueError):
                    raise IngestError(
                        f"non-numeric cell {cell!r} at line {lineno}, column {col!r}"
                    ) from None
                if not np.isfinite(v):
                    raise IngestError(f"non-finite cell at line {lineno}, column {col!r}")
                if k < len(predictors):
                    vals[k] = v
                else:
                    yval = v
            groups.setdefault(sid, []).append((vals, yval))

    if not groups:
        raise IngestError("file contains no data rows")
    counts = {sid: len(rows) for sid, rows in groups.items()}
    if len(set(counts.values())) != 1:
        raise IngestError(f"ragged replicate counts: {counts}")

    sample_ids = tuple(groups)  # file order
    design = np.stack([np.stack([v for v, _ in groups[s]]) for s in sample_ids])
    response = np.stack([np.array([yv for _, yv in groups[s]]) for s in sample_ids])
    return ReplicatedDataset(design, response, sample_ids)


def collapse_replicates(ds: ReplicatedDataset):
    """Per-sample replicate means for design and response."""
    return ds.design_replicates.mean(axis=1), ds.response_replicates.mean(axis=1)


def standardize(design: np.ndarray, response: np.ndarray) -> StandardizedDesign:
    """Center columns and response and scale to unit sample variance (ddof=1)."""
    X = np.asarray(design, dtype=np.float64)
    y = np.asarray(response, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need an (n, p) design with n >= 2")
    means = X.mean(axis=0)
    sds = X.std(axis=0, ddof=1)
    bad = np.nonzero(sds <= 0.0)[0]
    if bad.size:
        raise ZeroVarianceColumnError(int(bad[0]))
    y_mean = float(y.mean())
    y_sd = float(y.std(ddof=1))
    if y_sd <= 0.0:
        raise ValueError("response has zero sample variance")
    return StandardizedDesign(
        X=(X - means) / sds,
        y=(y - y_mean) / y_sd,
        column_means=means,
        column_sds=sds,
        y_mean=y_mean,
        y_sd=y_sd,
    )


def apply_scaling(X: np.ndarray, D: ScalingMatrix) -> np.ndarray:
    """Divide column j of X by D.diag[j] (the X <- X D^-1 transform)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != D.diag.shape[0]:
        raise ValueError("scaling matrix does not match design width")
    return X / D.diag


def unscale_coefficients(beta_scaled: np.ndarray, D: ScalingMatrix) -> np.ndarray:
    """Map coefficients fit on the scaled design back to the original design.

    If b' fits X D^-1 then D^-1 b' gives identical fitted values on X.
    """
    b = np.asarray(beta_scaled, dtype=np.float64)
    if b.shape[-1] != D.diag.shape[0]:
        raise ValueError("coefficient vector does not match scaling matrix")
    return b / D.diag
