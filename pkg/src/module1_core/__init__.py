"""
Module 1: Core Geometry and Metrics

Coordinate frames, ego-motion compensation, nearest-neighbor queries and
point-set distance metrics shared by every other module.

Topics: Rigid planar transforms, nearest-neighbor search, Chamfer/Hausdorff

Public API:
- EgoPose, EgoState, RadarPoint, RadarFrame: radar data records
- ego_to_world, world_to_ego, motion_compensate: frame conversions
- nearest_neighbor: exhaustive closest-point query with lowest-index ties
- chamfer, hausdorff, directed_distances: point-set metrics
"""

from src.module1_core.radar_types import (
    POINT_COLUMNS,
    EgoPose,
    EgoState,
    RadarFrame,
    RadarPoint,
)
from src.module1_core.geometry import (
    NearestNeighborResult,
    ego_to_world,
    motion_compensate,
    nearest_neighbor,
    normalize_angle,
    rotation_matrix,
    world_to_ego,
)
from src.module1_core.metrics import chamfer, directed_distances, hausdorff

__all__ = [
    "POINT_COLUMNS",
    "EgoPose",
    "EgoState",
    "RadarFrame",
    "RadarPoint",
    "NearestNeighborResult",
    "ego_to_world",
    "motion_compensate",
    "nearest_neighbor",
    "normalize_angle",
    "rotation_matrix",
    "world_to_ego",
    "chamfer",
    "directed_distances",
    "hausdorff",
]
