"""
Frame Conversions and Nearest-Neighbor Search

Poses are planar: a point in the ego frame is rotated by yaw and translated
by the GPS position to reach the world frame. z is carried through unchanged.

Input: Positions in one frame, ego poses
Output: Positions in another frame, closest-point correspondences
"""

from dataclasses import dataclass
from typing import Union
import math

import numpy as np

from src.module1_core.radar_types import EgoPose, normalize_angle

# Rows of the query block processed per step in nearest_neighbor
_NN_CHUNK = 1024

ArrayLike = Union[np.ndarray, list, tuple]

__all__ = [
    "NearestNeighborResult",
    "rotation_matrix",
    "normalize_angle",
    "ego_to_world",
    "world_to_ego",
    "motion_compensate",
    "nearest_neighbor",
]


@dataclass
class NearestNeighborResult:
    """Per-query closest reference point."""
    index: np.ndarray  # (m,) reference indices
    distance: np.ndarray  # (m,) Euclidean distances
    vector: np.ndarray  # (m, d) query - reference[index]


def rotation_matrix(yaw: float) -> np.ndarray:
    """Counter-clockwise 2x2 rotation."""
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s], [s, c]])


def _as_points(points: ArrayLike) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    return arr.reshape(1, -1) if arr.ndim == 1 else arr


def ego_to_world(points: ArrayLike, pose: EgoPose) -> np.ndarray:
    """
    Convert ego-frame positions to the world frame.

    Args:
        points: (d,) or (n, d) positions with d = 2 or 3
        pose: Ego pose the points were measured from

    Returns:
        Positions of the same shape in world coordinates
    """
    arr = np.asarray(points, dtype=float)
    flat = _as_points(arr)
    out = flat.copy()
    out[:, :2] = flat[:, :2] @ rotation_matrix(pose.yaw).T + (pose.x_world, pose.y_world)
    return out.reshape(arr.shape)


def world_to_ego(points: ArrayLike, pose: EgoPose) -> np.ndarray:
    """Inverse of ego_to_world."""
    arr = np.asarray(points, dtype=float)
    flat = _as_points(arr)
    out = flat.copy()
    shifted = flat[:, :2] - (pose.x_world, pose.y_world)
    out[:, :2] = shifted @ rotation_matrix(pose.yaw)
    return out.reshape(arr.shape)


def motion_compensate(points: ArrayLike, pose_prev: EgoPose, pose_curr: EgoPose) -> np.ndarray:
    """
    Re-express positions measured at pose_prev in the ego frame of pose_curr.

    Static world points land where the radar at pose_curr would see them.
    """
    return world_to_ego(ego_to_world(points, pose_prev), pose_curr)


def nearest_neighbor(query: ArrayLike, reference: ArrayLike) -> NearestNeighborResult:
    """
    Exhaustive closest-point search.

    Ties go to the lowest reference index (np.argmin returns the first minimum).

    Args:
        query: (d,) or (m, d) query positions
        reference: (n, d) non-empty reference positions

    Returns:
        NearestNeighborResult with index, distance and vector (query - reference)

    Raises:
        ValueError: if the reference set is empty
    """
    ref = _as_points(reference)
    if ref.size == 0:
        raise ValueError("empty reference set")
    q = _as_points(query)

    index = np.empty(len(q), dtype=np.int64)
    for start in range(0, len(q), _NN_CHUNK):
        block = q[start:start + _NN_CHUNK]
        sq = np.sum((block[:, None, :] - ref[None, :, :]) ** 2, axis=2)
        index[start:start + _NN_CHUNK] = np.argmin(sq, axis=1)

    vector = q - ref[index]
    distance = np.sqrt(np.sum(vector ** 2, axis=1))
    return NearestNeighborResult(index=index, distance=distance, vector=vector)
