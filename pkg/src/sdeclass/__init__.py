"""Plug-in classification of discretely observed diffusion paths.

Class drifts and the shared diffusion coefficient are estimated by
constrained B-spline least squares; the estimates are plugged into the
softmax form of the Bayes rule for mixtures of diffusions.
"""

from .classify import (
    BayesClassifier,
    PlugInClassifier,
    classify,
    empirical_risk,
    excess_risk,
    f_statistic,
    f_statistics,
    posterior_probs,
)
from .estimate import (
    EmptyClassWarning,
    EstimatorConfig,
    FittedModel,
    estimate_weights,
    fit_all,
    fit_drift_class,
    fit_sigma_sq,
    select_dimension_drift,
    select_dimension_sigma,
)
from .experiment import ExperimentSpec, RiskReport, reproduce, run_experiment
from .models import (
    DiffusionModel,
    ModelId,
    eval_drift,
    eval_sigma,
    make_cosine_model,
    make_model,
    make_ou_model,
    parse_model_id,
)
from .regress import (
    GramMatrix,
    NumericFailure,
    RegressionProblem,
    constrained_lsq,
    empirical_norm_sq,
    gram_matrix,
)
from .simulate import (
    PathDataset,
    PathSample,
    read_dataset,
    sample_dataset,
    simulate_path,
    write_dataset,
)
from .spline import (
    Clamp,
    KnotVector,
    SplineBasis,
    SplineFn,
    Threshold,
    build_knots,
    eval_basis,
    eval_spline,
    lipschitz_interpolant,
)

__version__ = "0.1.0"
