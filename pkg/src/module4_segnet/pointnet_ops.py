"""
Point Set Sampling, Grouping and Interpolation

The three geometric operations of a set-abstraction / feature-propagation
network. All are deterministic:
- farthest_point_sample starts at index 0 and breaks ties toward the lowest index
- ball_query keeps the first k indices (ascending) inside the radius
- interpolation_weights uses the 3 nearest centroids, inverse squared distance,
  ties going to the lowest centroid index
"""

from typing import List, Tuple

import numpy as np
from scipy.spatial.distance import cdist

# Squared distance below which a query counts as sitting exactly on a centroid
EXACT_HIT_SQ = 1e-20

# Largest set whose full distance matrix farthest_point_sample precomputes
FPS_MATRIX_LIMIT = 4096


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return cdist(np.asarray(a, dtype=float), np.asarray(b, dtype=float), "sqeuclidean")


def farthest_point_sample(coords: np.ndarray, m: int) -> np.ndarray:
    """
    Greedy max-min sampling.

    Args:
        coords: (n, d) positions, n >= 1
        m: Number of indices to select

    Returns:
        (m,) distinct indices, the first being 0

    Raises:
        ValueError: if m > n or the set is empty
    """
    coords = np.asarray(coords, dtype=float)
    n = len(coords)
    if n == 0:
        raise ValueError("cannot sample from an empty point set")
    if m > n:
        raise ValueError(f"cannot sample {m} of {n} points")
    selected = np.zeros(m, dtype=np.int64)
    if m == 0:
        return selected[:0]
    table = _sq_dists(coords, coords) if n <= FPS_MATRIX_LIMIT else None

    def row(i: int) -> np.ndarray:
        if table is not None:
            return table[i]
        return _sq_dists(coords[i:i + 1], coords)[0]

    # selected points hold -1 so argmax never returns them again
    min_sq = row(0).copy()
    min_sq[0] = -1.0
    for i in range(1, m):
        nxt = int(min_sq.argmax())
        selected[i] = nxt
        np.minimum(min_sq, row(nxt), out=min_sq)
        min_sq[nxt] = -1.0
    return selected

def ball_query(centroids: np.ndarray, coords: np.ndarray, radius: float, k: int) -> List[np.ndarray]:
    """
    Neighbors of each centroid within `radius`.

    Args:
        centroids: (m, d) query positions
        coords: (n, d) candidate positions
        radius: Ball radius (> 0)
        k: Maximum neighbors per centroid (>= 1)

    Returns:
        List of m index arrays: the first k in-radius indices in ascending
        order, or the single nearest point when the ball is empty
    """
    if radius <= 0 or k < 1:
        raise ValueError("radius must be > 0 and k >= 1")
    padded, counts = grouped_indices(centroids, coords, radius, k)
    return [padded[i, :counts[i]] for i in range(len(padded))]


def grouped_indices(centroids: np.ndarray, coords: np.ndarray, radius: float,
                    k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    ball_query in fixed-width form.

    Returns:
        (groups, counts): groups is (m, k), rows padded by repeating their
        first index; counts is the number of real members per row
    """
    sq = _sq_dists(np.asarray(centroids, dtype=float), np.asarray(coords, dtype=float))
    inside = sq <= radius * radius
    rank = np.cumsum(inside, axis=1)
    keep = inside & (rank <= k)
    counts = keep.sum(axis=1)

    groups = np.empty((len(sq), k), dtype=np.int64)
    rows, cols = np.nonzero(keep)
    slot = rank[rows, cols] - 1
    groups[rows, slot] = cols

    empty = counts == 0
    if np.any(empty):
        groups[empty, 0] = np.argmin(sq[empty], axis=1)
        counts = np.where(empty, 1, counts)
    fill = np.arange(k)[None, :] >= counts[:, None]
    groups[fill] = np.broadcast_to(groups[:, :1], groups.shape)[fill]
    return groups, counts


def interpolation_weights(queries: np.ndarray, centroids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Inverse-squared-distance weights over the 3 nearest centroids.

    A query lying exactly on a centroid takes that centroid's feature alone.

    Returns:
        (indices, weights), both (n, min(3, m)); weights rows sum to 1
    """
    sq = _sq_dists(np.asarray(queries, dtype=float), np.asarray(centroids, dtype=float))
    k = min(3, sq.shape[1])
    # centroids at or below the k-th smallest distance; a row with more than
    # k of them has a tie at the boundary and is ranked by (distance, index)
    kth = np.partition(sq, k - 1, axis=1)[:, k - 1:k]
    candidate = sq <= kth
    plain = candidate.sum(axis=1) == k
    nearest = np.empty((len(sq), k), dtype=np.int64)
    nearest[plain] = np.nonzero(candidate[plain])[1].reshape(-1, k)
    if not np.all(plain):
        nearest[~plain] = np.argsort(sq[~plain], axis=1, kind="stable")[:, :k]
    near_sq = np.take_along_axis(sq, nearest, axis=1)
    order = np.lexsort((nearest, near_sq), axis=1)
    nearest = np.take_along_axis(nearest, order, axis=1)
    near_sq = np.take_along_axis(near_sq, order, axis=1)

    hit = near_sq[:, 0] <= EXACT_HIT_SQ
    inv = 1.0 / np.maximum(near_sq, EXACT_HIT_SQ)
    weights = inv / inv.sum(axis=1, keepdims=True)
    weights[hit] = 0.0
    weights[hit, 0] = 1.0
    return nearest, weights
