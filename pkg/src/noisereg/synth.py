"""Synthetic data generation for the additive measurement-error model.

Latent predictors V are drawn once per sample and shared across replicates;
only the design noise and response noise vary per replicate, so within-sample
ANOVA recovers the per-variable noise variances.

Randomness uses numpy's counter-based Philox generator seeded through
SeedSequence.  Independent substreams (spawn keys 0, 1, 2 for V, design
noise, response noise) keep per-block draws order-independent, so identical
seeds reproduce identical datasets across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data_model import ReplicatedDataset

_CONSTRAINT_TOL = 1e-8


class ModelConstraintError(ValueError):
    """A unit-variance constraint of the generating model is violated; the
    message names the identity that failed."""


@dataclass(frozen=True)
class ModelSpec:
    """Ground-truth parameters of one synthetic dataset.

    The unit-variance convention requires Var(v_j) + sigma_delta_j^2 = 1 per
    predictor and sigma_w^2 + sigma_eps^2 = 1 for the response (the latter
    can be waived for degenerate examples via require_unit_response).
    """

    n: int
    p: int
    r: int
    beta_true: np.ndarray
    sigma_eps: float
    sigma_delta: np.ndarray
    v_covariance: np.ndarray
    seed: int = 0
    r_y: Optional[int] = None
    require_unit_response: bool = True

    def __post_init__(self):
        beta = np.asarray(self.beta_true, dtype=np.float64)
        sd = np.asarray(self.sigma_delta, dtype=np.float64)
        cov = np.asarray(self.v_covariance, dtype=np.float64)
        object.__setattr__(self, "beta_true", beta)
        object.__setattr__(self, "sigma_delta", sd)
        object.__setattr__(self, "v_covariance", cov)
        if self.r_y is None:
            object.__setattr__(self, "r_y", self.r)
        self.validate()

    def validate(self):
        p = self.p
        if self.beta_true.shape != (p,) or self.sigma_delta.shape != (p,):
            raise ModelConstraintError("beta_true and sigma_delta must have length p")
        if self.v_covariance.shape != (p, p):
            raise ModelConstraintError("v_covariance must be p x p")
        if (self.sigma_delta < 0).any() or self.sigma_eps < 0:
            raise ModelConstraintError("noise scales must be nonnegative")
        cov = self.v_covariance
        if np.abs(cov - cov.T).max() > 1e-10:
            raise ModelConstraintError("v_covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() < -1e-10:
            raise ModelConstraintError("v_covariance must be positive semidefinite")
        unit = np.diag(cov) + self.sigma_delta ** 2
        if np.abs(unit - 1.0).max() > _CONSTRAINT_TOL:
            raise ModelConstraintError(
                "unit-variance constraint sigma_v_j^2 + sigma_delta_j^2 = 1 violated")
        if self.require_unit_response:
            sw2 = float(self.beta_true @ cov @ self.beta_true)
            if abs(sw2 + self.sigma_eps ** 2 - 1.0) > _CONSTRAINT_TOL:
                raise ModelConstraintError(
                    "unit-variance constraint sigma_w^2 + sigma_eps^2 = 1 violated")

    @property
    def sigma_w_sq(self) -> float:
        return float(self.beta_true @ self.v_covariance @ self.beta_true)


def _streams(seed: int):
    children = np.random.SeedSequence(seed).spawn(3)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    # eigen factor instead of Cholesky: degenerate covariances are legitimate
    w, U = np.linalg.eigh(cov)
    return U * np.sqrt(np.clip(w, 0.0, None))


def generate_dataset(spec: ModelSpec):
    """Draw one replicated dataset; returns (dataset, truth).

    truth carries the hidden latent design V, the noiseless response w and
    beta_true for evaluation against the generating model.
    """
    rng_v, rng_delta, rng_eps = _streams(spec.seed)
    L = _psd_factor(spec.v_covariance)
    V = rng_v.standard_normal((spec.n, spec.p)) @ L.T
    w = V @ spec.beta_true
    delta = rng_delta.standard_normal((spec.n, spec.r, spec.p)) * spec.sigma_delta
    eps = rng_eps.standard_normal((spec.n, spec.r_y)) * spec.sigma_eps
    ds = ReplicatedDataset(
        design_replicates=V[:, None, :] + delta,
        response_replicates=w[:, None] + eps,
        sample_ids=tuple(f"s{i:06d}" for i in range(spec.n)),
    )
    return ds, {"V": V, "w": w, "beta_true": spec.beta_true.copy()}


# --- three-variable example with an exactly redundant predictor -------------

TOY_SIGMA_DELTA_SQ = np.array([0.5, 0.25, 0.25])
TOY_BETA_SPARSE = np.array([1.0, 0.0, 0.0])
TOY_BETA_SPREAD = np.array([0.0, 1.0, 1.0]) / np.sqrt(2.0)


def toy_covariance() -> np.ndarray:
    """Cov(V) forced by v1 = (v2 + v3)/sqrt(2) under unit total variance."""
    c12 = 1.0 / (2.0 * np.sqrt(2.0))
    return np.array([
        [0.5, c12, c12],
        [c12, 0.75, -0.25],
        [c12, -0.25, 0.75],
    ])


def toy_spec(n: int, seed: int = 0) -> ModelSpec:
    # response variance is sigma_w^2 = 1/2 here (w = v1 with no noise), so
    # the unit-response constraint is deliberately waived
    return ModelSpec(
        n=n, p=3, r=2,
        beta_true=TOY_BETA_SPARSE,
        sigma_eps=0.0,
        sigma_delta=np.sqrt(TOY_SIGMA_DELTA_SQ),
        v_covariance=toy_covariance(),
        seed=seed,
        require_unit_response=False,
    )


def toy_example(n: int, seed: int = 0):
    """Replicated draw of the 3-predictor example where the sparsest exact
    solution carries more design uncertainty than the spread one.

    The returned truth includes both exact solutions (beta_true sparse,
    beta_alt spread).
    """
    if n < 4:
        raise ValueError("need n >= 4")
    ds, truth = generate_dataset(toy_spec(n, seed))
    truth["beta_alt"] = TOY_BETA_SPREAD.copy()
    truth["sigma_delta_sq"] = TOY_SIGMA_DELTA_SQ.copy()
    return ds, truth


def attenuation_trials(sigma_nu_sq: float, sigma_delta_sq: float, n: int,
                       trials: int, seed: int = 0) -> np.ndarray:
    """OLS slope estimates for y = v, x = v + delta, beta = 1, one per trial.

    The expected slope is sigma_nu^2 / (sigma_nu^2 + sigma_delta^2): design
    noise attenuates the estimate toward zero.
    """
    if abs(sigma_nu_sq + sigma_delta_sq - 1.0) > _CONSTRAINT_TOL:
        raise ModelConstraintError(
            "attenuation experiment requires sigma_nu^2 + sigma_delta^2 = 1")
    if n < 10:
        raise ValueError("need n >= 10")
    rng_v, rng_delta, _ = _streams(seed)
    v = rng_v.standard_normal((trials, n)) * np.sqrt(sigma_nu_sq)
    x = v + rng_delta.standard_normal((trials, n)) * np.sqrt(sigma_delta_sq)
    return np.einsum("ti,ti->t", x, v) / np.einsum("ti,ti->t", x, x)


def attenuation_experiment(sigma_nu_sq: float, sigma_delta_sq: float, n: int,
                           trials: int, seed: int = 0) -> float:
    """Mean attenuation ratio over independent trials."""
    return float(attenuation_trials(sigma_nu_sq, sigma_delta_sq, n, trials, seed).mean())
