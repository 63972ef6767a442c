"""
Boundary Curve Fitting

Detected boundary points -> clusters -> gap-free segments -> one GP curve per
segment. A curve whose 95% interval grows wider than ci_threshold usually
covers two boundaries grouped together; its points are clustered again with
half the radius, at most max_recluster_depth times.

Input: Boundary points in the ego frame
Output: BoundaryCurves ordered by (min y, min x) of their members
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional
import json
import logging

import numpy as np

from src.module5_curvefit.clustering import ClusterConfig, cluster_boundaries, split_on_gap
from src.module5_curvefit.gaussian_process import GPPosterior, GPRConfig
from src.seeding import SUBSAMPLE_STREAM, substream

logger = logging.getLogger(__name__)

GRID_STEP = 0.5


@dataclass
class BoundaryCurve:
    """
    One fitted boundary.

    members: indices of the input points the curve was fitted to
    y_grid: nodes every GRID_STEP over the members' y extent
    mean_x / ci_half_width: posterior mean and 95% half-width at each node
    """
    cluster_id: int
    members: np.ndarray
    y_grid: np.ndarray
    mean_x: np.ndarray
    ci_half_width: np.ndarray
    posterior: Optional[GPPosterior] = None

    @property
    def max_ci_width(self) -> float:
        return float(2.0 * np.max(self.ci_half_width)) if len(self.ci_half_width) else 0.0

    def predict(self, y: np.ndarray) -> np.ndarray:
        """Mean x of the curve at arbitrary y."""
        if self.posterior is None:
            return np.interp(np.asarray(y, dtype=float), self.y_grid, self.mean_x)
        return self.posterior.predict(y)[0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cluster_id": self.cluster_id,
            "y_grid": self.y_grid.tolist(),
            "mean_x": self.mean_x.tolist(),
            "ci_half_width": self.ci_half_width.tolist(),
        }


def _y_grid(y: np.ndarray) -> np.ndarray:
    low, high = float(np.min(y)), float(np.max(y))
    return low + GRID_STEP * np.arange(int(np.floor((high - low) / GRID_STEP + 1e-9)) + 1)


def gpr_fit(cluster: np.ndarray, gpr_cfg: GPRConfig = GPRConfig(),
            cluster_cfg: ClusterConfig = ClusterConfig(), seed: int = 0,
            members: Optional[np.ndarray] = None, cluster_id: int = 0) -> BoundaryCurve:
    """
    Fit x = f(y) to one cluster.

    Args:
        cluster: (k, >=2) member positions, k >= 2
        seed: Root seed for the subsample drawn when k > subsample_max
        members: Indices to record on the curve (default 0..k-1)

    Raises:
        ValueError: fewer than 2 points, or "ill-conditioned kernel"
    """
    cluster = np.asarray(cluster, dtype=float)
    if len(cluster) < 2:
        raise ValueError("need at least 2 points to fit a curve")
    members = np.arange(len(cluster)) if members is None else np.asarray(members)
    train = cluster
    if len(cluster) > cluster_cfg.subsample_max:
        rng = substream(seed, SUBSAMPLE_STREAM, len(cluster))
        train = cluster[np.sort(rng.choice(len(cluster), cluster_cfg.subsample_max, replace=False))]

    posterior = GPPosterior.fit(train[:, 1], train[:, 0], gpr_cfg)
    y_grid = _y_grid(cluster[:, 1])
    mean_x, half = posterior.predict(y_grid)
    return BoundaryCurve(cluster_id, members, y_grid, mean_x, half, posterior)


def fit_boundaries(points: np.ndarray, cfg: ClusterConfig = ClusterConfig(),
                   gpr_cfg: GPRConfig = GPRConfig(), seed: int = 0) -> List[BoundaryCurve]:
    """
    Cluster, split on gaps, fit, and re-cluster uncertain curves.

    Args:
        points: (n, >=2) boundary points, x and y first

    Returns:
        Curves sorted by (min y, min x) of their members, ids renumbered in that order
    """
    points = np.asarray(points, dtype=float)
    curves: List[BoundaryCurve] = []

    def fit_group(indices: np.ndarray, eps: float, depth: int) -> None:
        for cluster in cluster_boundaries(points[indices], cfg, eps=eps):
            cluster = indices[cluster]
            for segment in split_on_gap(points[cluster, 1], cfg.gap_split):
                members = cluster[segment]
                if len(members) < max(cfg.min_pts, 2):
                    continue
                curve = gpr_fit(points[members], gpr_cfg, cfg, seed, members=members)
                if curve.max_ci_width > cfg.ci_threshold and depth < cfg.max_recluster_depth:
                    logger.debug("curve of %d points has CI width %.2f m, re-clustering with eps %.3f",
                                 len(members), curve.max_ci_width, eps / 2)
                    fit_group(members, eps / 2, depth + 1)
                else:
                    curves.append(curve)

    if len(points):
        fit_group(np.arange(len(points)), cfg.eps, 0)
    curves.sort(key=lambda c: (float(points[c.members, 1].min()), float(points[c.members, 0].min())))
    for i, curve in enumerate(curves):
        curve.cluster_id = i
    return curves


def curves_to_json(curves: List[BoundaryCurve]) -> str:
    """JSON array of {cluster_id, y_grid, mean_x, ci_half_width}."""
    return json.dumps([curve.to_dict() for curve in curves], separators=(",", ":"))
