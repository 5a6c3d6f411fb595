"""Boundary-free kernel estimation of the mean residual life function."""

from ._backend import available as available_backends
from .asymptotics import BTerms, Moments, b2_from_b1, eval_b, theoretical_bias_variance
from .bandwidth import BandwidthSelectionError, select_bandwidth_lscv
from .distributions import (
    AbsNormal,
    Beta,
    Exponential,
    Gamma,
    TrueDistribution,
    Uniform,
    Weibull,
    parse_distribution,
)
from .estimators import (
    BoundaryLimits,
    CurveEstimate,
    DomainError,
    EstimatorSpec,
    Sample,
    boundary_limits,
    empirical_mrl,
    evaluate_curve,
    naive_kernel_curves,
    t1_cum_survival,
    t1_survival,
    t2_cum_survival,
    t2_survival,
    transformed_mrl,
)
from .kernel import EPANECHNIKOV, GAUSSIAN, Kernel, get_kernel, kernel_constants, kernel_eval
from .simulation import (
    EstimatorTemplate,
    SimulationConfig,
    SimulationReport,
    bias_profile,
    normality_diagnostic,
    run_mc,
    true_mrl,
)
from .transform import (
    SupportInterval,
    Transform,
    make_exp_transform,
    make_identity_transform,
    make_probit_transform,
    transform_for_support,
    validate_transform,
)

__version__ = "0.1.0"
