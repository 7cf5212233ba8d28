"""noisereg: sparse linear regression for designs measured with per-variable
noise, estimated from replicates and folded into the fit by column scaling.

The workflow: estimate per-predictor noise variances by one-way ANOVA on
replicated measurements, build a diagonal scaling matrix of noise standard
deviations, fit l1-style paths (forward stagewise, LARS/lasso, or the Dantzig
selector) on the scaled design, and pick a model by nested cross validation
in which the variance estimates themselves are recomputed inside every
training fold.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .cv import (CvPlan, CvResult, curves_to_csv, cvresult_to_json,
                 kfold_assignments, make_folds, nested_kfold_cv,
                 select_optimal, selection_agreement)
from .dantzig import (DantzigProblem, LpSolveError, build_dantzig_lp,
                      dantzig_path, default_lambda_grid, solve_lp)
from .data_model import (CsvSchema, IngestError, ReplicatedDataset,
                         ScalingMatrix, StandardizedDesign,
                         ZeroVarianceColumnError, apply_scaling,
                         collapse_replicates, load_replicated_csv,
                         standardize, unscale_coefficients)
from .paths import (PathStep, SolutionPath, make_step, path_to_csv,
                    path_to_json, with_uncertainty)
from .pursuit import (DegenerateActiveSetError, default_stagewise_gamma,
                      forward_stagewise, lars_path, lasso_objective,
                      path_uncertainty)
from .ridge import RidgeFit, default_ridge_grid, ridge_cv, ridge_fit
from .synth import (ModelConstraintError, ModelSpec, attenuation_experiment,
                    attenuation_trials, generate_dataset, toy_covariance,
                    toy_example, toy_spec)
from .variance import (AllZeroUncertaintyError, AnovaEstimate,
                       anova_components, build_scaling_matrix, dataset_anova,
                       scaling_from_variances)

__all__ = [
    "__version__", "BACKEND",
    # data model
    "ReplicatedDataset", "StandardizedDesign", "ScalingMatrix", "CsvSchema",
    "IngestError", "ZeroVarianceColumnError", "load_replicated_csv",
    "collapse_replicates", "standardize", "apply_scaling",
    "unscale_coefficients",
    # variance components
    "AnovaEstimate", "AllZeroUncertaintyError", "anova_components",
    "dataset_anova", "scaling_from_variances", "build_scaling_matrix",
    # paths
    "PathStep", "SolutionPath", "make_step", "with_uncertainty",
    "path_to_csv", "path_to_json",
    # solvers
    "forward_stagewise", "lars_path", "default_stagewise_gamma",
    "lasso_objective", "path_uncertainty", "DegenerateActiveSetError",
    "DantzigProblem", "LpSolveError", "build_dantzig_lp", "solve_lp",
    "dantzig_path", "default_lambda_grid",
    "RidgeFit", "ridge_fit", "ridge_cv", "default_ridge_grid",
    # cross validation
    "CvPlan", "CvResult", "kfold_assignments", "make_folds",
    "nested_kfold_cv", "select_optimal", "selection_agreement",
    "cvresult_to_json", "curves_to_csv",
    # synthetic data
    "ModelSpec", "ModelConstraintError", "generate_dataset", "toy_spec",
    "toy_example", "toy_covariance", "attenuation_trials",
    "attenuation_experiment",
]
