"""
Physical-Constraint Filtering

Removes returns a static road boundary cannot produce:
- height outside [z_min, z_max] (overpasses, streetlights, elevation noise)
- Doppler deviating from the static-object expectation by more than
  doppler_dev_max (moving vehicles, ghosts)

Both thresholds are closed: a point exactly on a threshold survives.
Filters are selections: output rows are input rows, order preserved.

Input: RadarFrame (or (n, 6) point array) and its ego state
Output: Surviving points
"""

from dataclasses import dataclass
from typing import List, Tuple, Union
import logging
import math

import numpy as np

from src.module1_core.radar_types import EgoState, RadarFrame, RadarPoint

logger = logging.getLogger(__name__)

PointLike = Union[RadarPoint, np.ndarray, list, tuple]


@dataclass
class FilterConfig:
    """Thresholds for the physical-constraint filters."""
    z_max: float = 3.0
    z_min: float = -1.5
    doppler_dev_max: float = 1.0

    def validate(self) -> Tuple[bool, List[str]]:
        """
        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if not self.z_max > self.z_min:
            errors.append("z_max must be greater than z_min")
        if not self.doppler_dev_max > 0:
            errors.append("doppler_dev_max must be > 0")
        return len(errors) == 0, errors


def height_mask(points: np.ndarray, cfg: FilterConfig) -> np.ndarray:
    """Boolean mask of rows with z_min <= z <= z_max."""
    z = np.asarray(points, dtype=float).reshape(-1, 6)[:, 2]
    return (z >= cfg.z_min) & (z <= cfg.z_max)


def height_filter(points: np.ndarray, cfg: FilterConfig) -> np.ndarray:
    """Rows of `points` inside the height band."""
    points = np.asarray(points, dtype=float).reshape(-1, 6)
    return points[height_mask(points, cfg)]


def expected_static_doppler(point: PointLike, ego_speed: float) -> float:
    """
    Doppler a static object at the point's position would produce.

    Args:
        point: RadarPoint or a row starting with x, y
        ego_speed: Vehicle speed in m/s

    Returns:
        -ego_speed * y / sqrt(x^2 + y^2)

    Raises:
        ValueError: when x = y = 0 ("degenerate bearing")
    """
    if isinstance(point, RadarPoint):
        x, y = point.x, point.y
    else:
        x, y = float(point[0]), float(point[1])
    r = math.hypot(x, y)
    if r == 0.0:
        raise ValueError("degenerate bearing")
    return -ego_speed * y / r


def doppler_deviation(points: np.ndarray, ego_speed: float) -> np.ndarray:
    """|measured - expected| per row; NaN where the bearing is degenerate."""
    points = np.asarray(points, dtype=float).reshape(-1, 6)
    r = np.hypot(points[:, 0], points[:, 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        expected = -ego_speed * points[:, 1] / r
    deviation = np.abs(points[:, 3] - expected)
    deviation[r == 0.0] = np.nan
    return deviation


def doppler_mask(points: np.ndarray, ego: EgoState, cfg: FilterConfig) -> np.ndarray:
    """Rows whose Doppler deviation is within the threshold; degenerate bearings pass."""
    deviation = doppler_deviation(points, ego.speed)
    return np.isnan(deviation) | (deviation <= cfg.doppler_dev_max)


def doppler_filter(points: np.ndarray, ego: EgoState, cfg: FilterConfig) -> np.ndarray:
    """Rows of `points` consistent with a static reflector."""
    points = np.asarray(points, dtype=float).reshape(-1, 6)
    return points[doppler_mask(points, ego, cfg)]


def filter_mask(frame: RadarFrame, cfg: FilterConfig) -> np.ndarray:
    """Combined height-then-Doppler survival mask over the frame's rows."""
    keep = height_mask(frame.points, cfg)
    keep[keep] = doppler_mask(frame.points[keep], frame.ego, cfg)
    return keep


def filter_frame(frame: RadarFrame, cfg: FilterConfig) -> RadarFrame:
    """
    Apply the height filter, then the Doppler filter, to one frame.

    Labels and source tags stay aligned with the surviving points.
    """
    keep = filter_mask(frame, cfg)
    logger.debug("t=%.2f: %d of %d points survive filtering", frame.timestamp, int(keep.sum()), len(frame))
    return frame.subset(keep)
