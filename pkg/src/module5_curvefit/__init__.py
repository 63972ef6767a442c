"""
Module 5: Boundary Curve Fitting

Groups detected boundary points into separate boundaries and fits each with
Gaussian process regression, with 95% confidence intervals.

Topics: Density-based clustering, Gaussian processes, Matern kernels

Public API:
- ClusterConfig, dbscan, cluster_boundaries, split_on_gap: grouping
- GPRConfig, matern_kernel, GPPosterior: regression
- BoundaryCurve, gpr_fit, fit_boundaries, curves_to_json: curves
"""

from src.module5_curvefit.clustering import NOISE, ClusterConfig, cluster_boundaries, dbscan, split_on_gap
from src.module5_curvefit.gaussian_process import (
    CI_Z,
    MAX_JITTER,
    GPPosterior,
    GPRConfig,
    jittered_cholesky,
    matern_kernel,
)
from src.module5_curvefit.boundary_fitter import (
    GRID_STEP,
    BoundaryCurve,
    curves_to_json,
    fit_boundaries,
    gpr_fit,
)

__all__ = [
    "NOISE",
    "ClusterConfig",
    "cluster_boundaries",
    "dbscan",
    "split_on_gap",
    "CI_Z",
    "MAX_JITTER",
    "GPPosterior",
    "GPRConfig",
    "jittered_cholesky",
    "matern_kernel",
    "GRID_STEP",
    "BoundaryCurve",
    "curves_to_json",
    "fit_boundaries",
    "gpr_fit",
]
