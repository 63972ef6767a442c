"""
Point-Set Distance Metrics

Chamfer and Hausdorff distances between detected and actual boundary points.
Chamfer is the symmetric average of the two directed mean closest-point
distances; Hausdorff is the larger of the two directed maxima.
"""

from typing import Tuple

import numpy as np
from scipy.spatial.distance import cdist


def _pair(a, b) -> Tuple[np.ndarray, np.ndarray]:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("undefined metric")
    return a, b


def directed_distances(a, b) -> np.ndarray:
    """For each point of a, the distance to its closest point in b."""
    a, b = _pair(a, b)
    return cdist(a, b).min(axis=1)


def chamfer(a, b) -> float:
    """
    Symmetric Chamfer distance.

    Args:
        a: (n, d) non-empty point set
        b: (m, d) non-empty point set

    Returns:
        0.5 * (mean_a min_b |a-b| + mean_b min_a |a-b|)
    """
    a, b = _pair(a, b)
    m = cdist(a, b)
    return 0.5 * (float(m.min(axis=1).mean()) + float(m.min(axis=0).mean()))


def hausdorff(a, b) -> float:
    """Bidirectional Hausdorff distance."""
    a, b = _pair(a, b)
    m = cdist(a, b)
    return max(float(m.min(axis=1).max()), float(m.min(axis=0).max()))
