import numpy as np
import pytest

from noisereg import (ModelConstraintError, ModelSpec, attenuation_experiment,
                      attenuation_trials, generate_dataset, toy_covariance,
                      toy_example, toy_spec)
from noisereg.synth import TOY_BETA_SPARSE, TOY_BETA_SPREAD, TOY_SIGMA_DELTA_SQ


def simple_spec(seed=0, **kw):
    args = dict(
        n=50, p=2, r=2,
        beta_true=np.array([0.8, 0.0]),
        sigma_delta=np.array([0.5, 0.5]),
        v_covariance=0.75 * np.eye(2),
        seed=seed,
    )
    args["sigma_eps"] = np.sqrt(1 - args["beta_true"] @ args["v_covariance"]
                                @ args["beta_true"])
    args.update(kw)
    return ModelSpec(**args)


def test_constraint_violation_names_identity():
    with pytest.raises(ModelConstraintError, match=r"sigma_v_j\^2 \+ sigma_delta_j\^2 = 1"):
        ModelSpec(n=10, p=1, r=2, beta_true=np.array([1.0]), sigma_eps=0.0,
                  sigma_delta=np.array([0.9]), v_covariance=np.array([[0.9]]))


def test_response_constraint_enforced_and_waivable():
    kw = dict(n=10, p=1, r=2, beta_true=np.array([0.5]),
              sigma_eps=0.0, sigma_delta=np.array([0.5]),
              v_covariance=np.array([[0.75]]))
    with pytest.raises(ModelConstraintError, match=r"sigma_w\^2 \+ sigma_eps\^2 = 1"):
        ModelSpec(**kw)
    spec = ModelSpec(require_unit_response=False, **kw)
    assert spec.sigma_w_sq == pytest.approx(0.1875)


def test_non_psd_covariance_rejected():
    with pytest.raises(ModelConstraintError, match="positive semidefinite"):
        ModelSpec(n=10, p=2, r=2, beta_true=np.zeros(2), sigma_eps=1.0,
                  sigma_delta=np.array([0.5, 0.5]),
                  v_covariance=np.array([[0.75, 0.9], [0.9, 0.75]]))


def test_noiseless_replicates_identical():
    spec = simple_spec(sigma_delta=np.zeros(2), sigma_eps=0.0,
                       v_covariance=np.eye(2),
                       beta_true=np.array([0.8, 0.0]),
                       require_unit_response=False)
    ds, truth = generate_dataset(spec)
    assert np.array_equal(ds.design_replicates[:, 0], ds.design_replicates[:, 1])
    assert np.allclose(ds.response_replicates[:, 0], truth["V"] @ spec.beta_true)


def test_same_seed_identical_dataset():
    a, _ = generate_dataset(simple_spec(seed=9))
    b, _ = generate_dataset(simple_spec(seed=9))
    assert np.array_equal(a.design_replicates, b.design_replicates)
    assert np.array_equal(a.response_replicates, b.response_replicates)


def test_different_seed_differs():
    a, _ = generate_dataset(simple_spec(seed=1))
    b, _ = generate_dataset(simple_spec(seed=2))
    assert not np.array_equal(a.design_replicates, b.design_replicates)


def test_observed_covariance_matches_model():
    """Cov(X) approaches Cov(V) + diag(sigma_delta^2) at n = 10^4."""
    spec = simple_spec(n=10000, seed=3)
    ds, _ = generate_dataset(spec)
    X = ds.design_replicates[:, 0, :]
    cov = np.cov(X, rowvar=False)
    target = spec.v_covariance + np.diag(spec.sigma_delta ** 2)
    assert np.abs(cov - target).max() < 0.05


def test_moments_and_independence():
    spec = simple_spec(n=10000, seed=4)
    ds, truth = generate_dataset(spec)
    X = ds.design_replicates[:, 0, :]
    n = spec.n
    se = 1.0 / np.sqrt(n)
    assert np.abs(X.mean(axis=0)).max() < 3 * se
    assert np.abs(X.var(axis=0) - 1.0).max() < 3 * np.sqrt(2) * se
    delta = X - truth["V"]
    eps = ds.response_replicates[:, 0] - truth["w"]
    for j in range(spec.p):
        assert abs(np.corrcoef(eps, delta[:, j])[0, 1]) < 3 * se
    assert abs(np.corrcoef(delta[:, 0], delta[:, 1])[0, 1]) < 3 * se


def test_toy_covariance_forced_by_linear_identity():
    cov = toy_covariance()
    # v1 = (v2 + v3)/sqrt(2) forces Var(v1) and the cross terms
    assert cov[0, 0] == pytest.approx((cov[1, 1] + 2 * cov[1, 2] + cov[2, 2]) / 2)
    assert cov[0, 1] == pytest.approx((cov[1, 1] + cov[1, 2]) / np.sqrt(2))
    assert np.linalg.eigvalsh(cov).min() > -1e-12
    # unit-variance convention per coordinate
    assert np.allclose(np.diag(cov) + TOY_SIGMA_DELTA_SQ, 1.0)


def test_toy_example_two_exact_solutions():
    ds, truth = toy_example(200, seed=5)
    V = truth["V"]
    w = truth["w"]
    assert np.abs(V @ TOY_BETA_SPARSE - w).max() < 1e-10
    assert np.abs(V @ TOY_BETA_SPREAD - w).max() < 1e-10
    assert "beta_alt" in truth


def test_toy_uncertainty_values():
    S = np.sqrt(TOY_SIGMA_DELTA_SQ)
    assert np.linalg.norm(S * TOY_BETA_SPARSE) == pytest.approx(np.sqrt(0.5))
    assert np.linalg.norm(S * TOY_BETA_SPREAD) == pytest.approx(0.5)


def test_toy_example_needs_four_samples():
    with pytest.raises(ValueError):
        toy_example(3)


def test_toy_spec_replicated_noiseless_response():
    spec = toy_spec(20, seed=0)
    assert spec.r == 2
    assert spec.sigma_eps == 0.0


def test_attenuation_requires_unit_constraint():
    with pytest.raises(ModelConstraintError):
        attenuation_trials(0.5, 0.4, n=100, trials=10)


def test_attenuation_no_noise_is_unbiased():
    ratio = attenuation_experiment(1.0, 0.0, n=200, trials=200, seed=0)
    assert ratio == pytest.approx(1.0, abs=0.02)


def test_attenuation_half_half():
    trials = attenuation_trials(0.5, 0.5, n=1000, trials=500, seed=1)
    se = trials.std(ddof=1) / np.sqrt(len(trials))
    assert abs(trials.mean() - 0.5) < 3 * se + 2e-3
