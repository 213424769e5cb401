"""Bayesian optimization with a Wasserstein-barycenter GP ensemble surrogate.

The surrogate combines N squared-exponential GPs with fixed, pre-sampled
hyperparameters into a single model: at every location the posterior is the
2-Wasserstein barycenter of the member posteriors, whose LCB equals the
average of the member LCBs. The package also ships a vanilla MLE-fitted
GP-BO baseline and a nine-problem univariate benchmark harness.
"""

from .acquisition import AcquisitionConfig, lcb, optimize_acquisition
from .campaign import CampaignResult, CellResult, emit_results, run_campaign
from .ensemble import (
    GPEnsemble,
    HyperparamPool,
    barycenter_posterior,
    build_pool,
    ensemble_lcb,
    ensemble_predict,
    ensemble_total_predict,
    fit_ensemble,
    refit,
    sample_ensemble_hyperparams,
)
from .gp import (
    Dataset,
    FittedGP,
    GPFitError,
    KernelHyperparams,
    PosteriorGaussian,
    fit_gp,
    fit_gp_escalating,
    kernel_eval,
    log_marginal_likelihood,
    mle_fit,
    posterior,
)
from .loop import (
    ALG_GP_BO,
    ALG_WBGP_BO,
    BORunError,
    RunConfig,
    RunTrace,
    lhs_init,
    run_gp_bo,
    run_wbgp_bo,
)
from .problems import TestProblem, get_problem, problem_suite, rescaled_eval
from .stats import WilcoxonResult, wilcoxon_paired
from .wasserstein import (
    BarycenterWeights,
    GaussianMeasure1D,
    GaussianMeasureND,
    barycenter_1d,
    bures_squared,
    w2_squared_1d,
    w2_squared_nd,
)

__version__ = "0.1.0"
