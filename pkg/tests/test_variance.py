import numpy as np
import pytest

from noisereg import (AllZeroUncertaintyError, ScalingMatrix, anova_components,
                      build_scaling_matrix, dataset_anova, generate_dataset,
                      scaling_from_variances, ModelSpec)
from noisereg.variance import AnovaEstimate


def test_hand_example_exact():
    # n=2 samples, r=2 replicates: {(1,3), (5,7)}
    est = anova_components(np.array([[1.0, 3.0], [5.0, 7.0]]))
    assert est.ss_error == 4.0
    assert est.s_delta_sq == 2.0
    assert est.ss_treatment == 16.0
    assert est.s_nu_sq == 7.0
    assert (est.df_treatment, est.df_error) == (1, 2)


def test_identical_replicates_zero_noise():
    est = anova_components(np.array([[2.0, 2.0], [9.0, 9.0], [4.0, 4.0]]))
    assert est.s_delta_sq == 0.0
    assert est.s_nu_sq > 0.0


def test_all_identical_both_zero():
    est = anova_components(np.full((4, 3), 5.0))
    assert est.s_delta_sq == 0.0
    assert est.s_nu_sq == 0.0


def test_negative_moment_clamped():
    # within-sample spread larger than between-sample spread
    z = np.array([[0.0, 10.0], [5.0, 4.9]])
    est = anova_components(z)
    assert est.s_nu_sq == 0.0


def test_decomposition_identity_without_clamp():
    rng = np.random.default_rng(0)
    z = rng.standard_normal((12, 3)) + 5 * rng.standard_normal((12, 1))
    est = anova_components(z)
    if est.s_nu_sq > 0:
        lhs = z.shape[1] * est.s_nu_sq + est.s_delta_sq
        assert abs(lhs - est.ss_treatment / est.df_treatment) < 1e-10


def test_permutation_invariance():
    rng = np.random.default_rng(1)
    z = rng.standard_normal((10, 2))
    a = anova_components(z)
    b = anova_components(z[rng.permutation(10)])
    assert abs(a.s_delta_sq - b.s_delta_sq) < 1e-12
    assert abs(a.s_nu_sq - b.s_nu_sq) < 1e-12


def test_degrees_of_freedom_preconditions():
    with pytest.raises(ValueError):
        anova_components(np.ones((1, 3)))
    with pytest.raises(ValueError):
        anova_components(np.ones((3, 1)))


def test_consistency_on_synthetic():
    """s_delta^2 approaches the generating sigma_delta^2 = 0.25 at n = 2000."""
    spec = ModelSpec(
        n=2000, p=1, r=2,
        beta_true=np.array([1.0]),
        sigma_eps=np.sqrt(1 - 0.75),
        sigma_delta=np.array([0.5]),
        v_covariance=np.array([[0.75]]),
        seed=11,
    )
    ds, _ = generate_dataset(spec)
    per_var, _ = dataset_anova(ds)
    assert abs(per_var[0].s_delta_sq - 0.25) / 0.25 < 0.10


def test_scaling_toy_variances():
    D = scaling_from_variances(np.array([0.5, 0.25, 0.25]))
    assert np.allclose(D.diag, [np.sqrt(0.5), 0.5, 0.5], atol=1e-15)


def test_scaling_unit_variances_identity():
    D = scaling_from_variances(np.ones(3))
    assert np.array_equal(D.diag, np.ones(3))


def test_scaling_floor_engages():
    D = scaling_from_variances(np.array([0.0, 1.0]), floor_rel=1e-3)
    assert np.allclose(D.diag, [1e-3, 1.0])


def test_scaling_all_zero_raises():
    with pytest.raises(AllZeroUncertaintyError):
        scaling_from_variances(np.zeros(4))


def test_build_from_estimates():
    ests = [AnovaEstimate(s_delta_sq=v, s_nu_sq=0.0, ss_treatment=0.0,
                          ss_error=0.0, df_treatment=1, df_error=1)
            for v in (0.5, 0.25, 0.25)]
    D = build_scaling_matrix(ests)
    assert isinstance(D, ScalingMatrix)
    assert np.allclose(D.diag, [np.sqrt(0.5), 0.5, 0.5])


def test_dataset_anova_response_optional():
    rng = np.random.default_rng(2)
    from noisereg import ReplicatedDataset
    ds = ReplicatedDataset(
        design_replicates=rng.standard_normal((5, 2, 3)),
        response_replicates=rng.standard_normal((5, 1)),
        sample_ids=tuple("abcde"),
    )
    per_var, resp = dataset_anova(ds)
    assert len(per_var) == 3
    assert resp is None
