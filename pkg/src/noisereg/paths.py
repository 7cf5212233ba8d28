"""Solution path containers shared by the pursuit and Dantzig solvers, plus
JSON/CSV export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data_model import ScalingMatrix, unscale_coefficients

SUPPORT_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class PathStep:
    beta: np.ndarray
    active_set: tuple
    rss: float
    l1_norm: float
    uncertainty: float
    lam: float  # max absolute residual correlation (or grid value for Dantzig)

    def __post_init__(self):
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=np.float64))
        object.__setattr__(self, "active_set", tuple(int(i) for i in self.active_set))


@dataclass(frozen=True)
class SolutionPath:
    steps: tuple
    config: dict = field(default_factory=dict)
    scaled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)

    @property
    def betas(self) -> np.ndarray:
        return np.stack([s.beta for s in self.steps])

    @property
    def final(self) -> PathStep:
        return self.steps[-1]


def make_step(beta, rss, lam, uncertainty=None) -> PathStep:
    beta = np.asarray(beta, dtype=np.float64)
    active = tuple(np.nonzero(np.abs(beta) > SUPPORT_ZERO_TOL)[0].tolist())
    if uncertainty is None:
        uncertainty = float(np.linalg.norm(beta))
    return PathStep(
        beta=beta,
        active_set=active,
        rss=float(rss),
        l1_norm=float(np.abs(beta).sum()),
        uncertainty=float(uncertainty),
        lam=float(lam),
    )


def with_uncertainty(path: SolutionPath, S: ScalingMatrix,
                     coefficients_are_scaled: Optional[bool] = None) -> SolutionPath:
    """Copy of the path with the uncertainty field recomputed as ||S b||_2,
    mapping scaled-design coefficients back to the original design first."""
    from .pursuit import path_uncertainty  # local import avoids a cycle

    if coefficients_are_scaled is None:
        coefficients_are_scaled = path.scaled
    unc = path_uncertainty(path, S, coefficients_are_scaled)
    steps = tuple(
        PathStep(s.beta, s.active_set, s.rss, s.l1_norm, float(u), s.lam)
        for s, u in zip(path.steps, unc)
    )
    return SolutionPath(steps=steps, config=dict(path.config), scaled=path.scaled)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def path_to_csv(path: SolutionPath, fileobj) -> None:
    """One row per step: index, lambda, l1_norm, rss, uncertainty, nonzero
    count, then alternating (index, value) pairs for the nonzero coefficients."""
    fileobj.write("step,lambda,l1_norm,rss,uncertainty,nonzeros,coefficients\n")
    for k, s in enumerate(path.steps):
        cells = [str(k), _fmt(s.lam), _fmt(s.l1_norm), _fmt(s.rss),
                 _fmt(s.uncertainty), str(len(s.active_set))]
        for j in s.active_set:
            cells.append(str(j))
            cells.append(_fmt(s.beta[j]))
        fileobj.write(",".join(cells) + "\n")


def path_to_json(path: SolutionPath) -> str:
    doc = {
        "scaled": path.scaled,
        "config": path.config,
        "steps": [
            {
                "step": k,
                "lambda": s.lam,
                "l1_norm": s.l1_norm,
                "rss": s.rss,
                "uncertainty": s.uncertainty,
                "active_set": list(s.active_set),
                "coefficients": {str(j): s.beta[j] for j in s.active_set},
            }
            for k, s in enumerate(path.steps)
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)
