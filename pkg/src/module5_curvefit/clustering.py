"""
Boundary Point Clustering

Road boundaries run roughly along the driving direction, so y is divided by
y_scale before DBSCAN: points chain easily along a boundary while parallel
boundaries a few meters apart stay separate.

Input: Detected boundary points (ego frame)
Output: Member index arrays, one per cluster
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple
import logging

import numpy as np
from scipy.spatial import cKDTree

logger = logging.getLogger(__name__)

NOISE = -1


@dataclass
class ClusterConfig:
    y_scale: float = 5.0
    eps: float = 1.5
    min_pts: int = 3
    gap_split: float = 6.0
    subsample_max: int = 120
    ci_threshold: float = 2.0
    max_recluster_depth: int = 2

    def validate(self) -> Tuple[bool, List[str]]:
        errors = []
        if self.y_scale < 1:
            errors.append("y_scale must be >= 1")
        for name in ("eps", "gap_split", "ci_threshold"):
            if getattr(self, name) <= 0:
                errors.append(f"{name} must be > 0")
        if self.min_pts < 1:
            errors.append("min_pts must be >= 1")
        if self.subsample_max < 2:
            errors.append("subsample_max must be >= 2")
        if self.max_recluster_depth < 0:
            errors.append("max_recluster_depth must be >= 0")
        return len(errors) == 0, errors


def dbscan(points_2d: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """
    Density-based clustering.

    Seeds are taken in index order and a cluster grows breadth-first from its
    seed. A neighborhood includes the point itself; a point is core when its
    neighborhood holds at least min_pts points. Border points belong to the
    first cluster that reaches them.

    Returns:
        (n,) labels 0, 1, ... in order of creation, NOISE (-1) for noise
    """
    if eps <= 0 or min_pts < 1:
        raise ValueError("eps must be > 0 and min_pts >= 1")
    points_2d = np.asarray(points_2d, dtype=float).reshape(-1, 2)
    n = len(points_2d)
    labels = np.full(n, NOISE, dtype=np.int64)
    if n == 0:
        return labels
    tree = cKDTree(points_2d)

    def region(i: int) -> List[int]:
        return tree.query_ball_point(points_2d[i], eps, return_sorted=True)

    visited = np.zeros(n, dtype=bool)
    cluster = 0
    for seed in range(n):
        if visited[seed]:
            continue
        visited[seed] = True
        neighbors = region(seed)
        if len(neighbors) < min_pts:
            continue
        labels[seed] = cluster
        queue = list(neighbors)
        head = 0
        while head < len(queue):
            j = queue[head]
            head += 1
            if labels[j] == NOISE:
                labels[j] = cluster
            if visited[j]:
                continue
            visited[j] = True
            more = region(j)
            if len(more) >= min_pts:
                queue.extend(more)
        cluster += 1
    return labels


def cluster_boundaries(points: np.ndarray, cfg: ClusterConfig = ClusterConfig(),
                       eps: Optional[float] = None) -> List[np.ndarray]:
    """
    DBSCAN on (x, y / y_scale).

    Args:
        points: (n, >=2) positions, x and y first
        eps: Overrides cfg.eps (used when re-clustering)

    Returns:
        Member indices of each cluster, in cluster-creation order; noise dropped
    """
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        return []
    scaled = np.column_stack([points[:, 0], points[:, 1] / cfg.y_scale])
    labels = dbscan(scaled, cfg.eps if eps is None else eps, cfg.min_pts)
    clusters = [np.nonzero(labels == c)[0] for c in range(labels.max() + 1)]
    logger.debug("%d points -> %d clusters, %d noise", len(points), len(clusters), int(np.sum(labels == NOISE)))
    return clusters


def split_on_gap(y: np.ndarray, gap_split: float = 6.0) -> List[np.ndarray]:
    """
    Cut a cluster where consecutive sorted y values differ by more than gap_split.

    Args:
        y: (k,) y coordinates of the cluster members

    Returns:
        Index arrays into `y`, each sorted by y, together covering every member once
    """
    y = np.asarray(y, dtype=float)
    if len(y) == 0:
        return []
    order = np.argsort(y, kind="stable")
    cuts = np.nonzero(np.diff(y[order]) > gap_split)[0] + 1
    return np.split(order, cuts)
