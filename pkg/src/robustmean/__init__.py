"""Heavy-tailed mean estimation with a spectral descent estimator.

The main entry point is :func:`estimate_mean`; baselines, synthetic data and a
benchmark harness are provided alongside.
"""

from .baselines import empirical_mean, geometric_median
from .bucketing import bucket_means, coordinate_median_of_means
from .core import (BucketMeans, DataSet, EstimateReport, EstimatorConfig, SubgaussianRadius,
                   compute_r_delta, resolve_k)
from .descent import descent, estimate_mean
from .errors import (DegenerateData, InfeasibleCap, InsufficientSamples, InvalidInput, NoMargin,
                     RobustMeanError, ZeroMatrix)
from .fhp import fhp_solve
from .inner_max import MarginCertificate, approx_bregman, dist_est, grad_est, round_vectors, search_margin
from .pruning import center_and_scale, prune
from .simplex_projection import kl_project, mwu_reweight
from .spectral import WeightedMatrixView, power_top_singular, project_to_span

__all__ = [
    "BucketMeans", "DataSet", "DegenerateData", "EstimateReport", "EstimatorConfig", "InfeasibleCap",
    "InsufficientSamples", "InvalidInput", "MarginCertificate", "NoMargin", "RobustMeanError",
    "SubgaussianRadius", "WeightedMatrixView", "ZeroMatrix", "approx_bregman", "bucket_means",
    "center_and_scale", "compute_r_delta", "coordinate_median_of_means", "descent", "dist_est",
    "empirical_mean", "estimate_mean", "fhp_solve", "geometric_median", "grad_est", "kl_project",
    "mwu_reweight", "power_top_singular", "project_to_span", "prune", "resolve_k", "round_vectors",
    "search_margin",
]

__version__ = "0.1.0"
