"""
Radar Data Records

This module defines the records every other module passes around:
- EgoPose: planar GPS pose of the vehicle in the world frame
- EgoState: pose plus speed and yaw rate from GPS/IMU
- RadarPoint: one radar return
- RadarFrame: a timestamped set of returns with the ego state

Coordinate convention (ego frame): x to the right, y forward, z up, origin at
the radar. Yaw is counter-clockwise; yaw = 0 aligns vehicle forward with world +y.

Point array layout (RadarFrame.points), one row per return:
    [x, y, z, doppler, snr, range]
Doppler is the signed range rate, positive = receding.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple
import math

import numpy as np

POINT_COLUMNS: Tuple[str, ...] = ("x", "y", "z", "doppler", "snr", "range")
RANGE_TOLERANCE = 1e-6


def normalize_angle(angle: float) -> float:
    """Wrap an angle in radians into (-pi, pi]."""
    wrapped = math.remainder(float(angle), 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class EgoPose:
    """Planar pose; yaw is normalized to (-pi, pi] on construction."""
    x_world: float
    y_world: float
    yaw: float

    def __post_init__(self):
        object.__setattr__(self, "yaw", normalize_angle(self.yaw))


@dataclass(frozen=True)
class EgoState:
    """Vehicle state attached to every frame."""
    pose: EgoPose
    speed: float  # m/s along vehicle +y
    yaw_rate: float  # rad/s

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError(f"speed must be non-negative, got {self.speed}")


@dataclass(frozen=True)
class RadarPoint:
    """A single radar return."""
    x: float
    y: float
    z: float
    doppler: float
    snr: float
    range: float

    @classmethod
    def from_position(cls, x: float, y: float, z: float, doppler: float, snr: float) -> "RadarPoint":
        """Build a point whose range is derived from its position."""
        return cls(x, y, z, doppler, snr, math.sqrt(x * x + y * y + z * z))

    @classmethod
    def from_row(cls, row) -> "RadarPoint":
        return cls(*(float(v) for v in row[:6]))

    def to_row(self) -> List[float]:
        return [self.x, self.y, self.z, self.doppler, self.snr, self.range]


@dataclass
class RadarFrame:
    """
    One radar sweep.

    points: (n, 6) array in POINT_COLUMNS order.
    labels: optional (n,) array of {0, 1}, 1 = road boundary.
    sources: optional (n,) array with the index of the boundary polyline a
             return came from, or a negative tag
             (-1 ghost, -2 mover, -3 overhead). Only the simulator fills it; it is not
             part of the dataset file.
    """
    timestamp: float
    ego: EgoState
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 6)))
    labels: Optional[np.ndarray] = None
    sources: Optional[np.ndarray] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 6)
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
            if len(self.labels) != len(self.points):
                raise ValueError(
                    f"labels length {len(self.labels)} does not match {len(self.points)} points"
                )
        if self.sources is not None:
            self.sources = np.asarray(self.sources, dtype=np.int64).reshape(-1)
            if len(self.sources) != len(self.points):
                raise ValueError("sources must align 1:1 with points")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def positions(self) -> np.ndarray:
        """(n, 3) x, y, z columns."""
        return self.points[:, :3]

    def point(self, index: int) -> RadarPoint:
        return RadarPoint.from_row(self.points[index])

    def subset(self, mask: np.ndarray) -> "RadarFrame":
        """
        Return a new frame holding only the selected rows (order preserved).

        Args:
            mask: Boolean mask or index array over the points

        Returns:
            New RadarFrame with labels and sources selected alongside
        """
        return replace(
            self,
            points=self.points[mask].copy(),
            labels=None if self.labels is None else self.labels[mask].copy(),
            sources=None if self.sources is None else self.sources[mask].copy(),
        )

    def validate(self) -> Tuple[bool, List[str]]:
        """
        Check the point invariants.

        Checks:
        - range equals the norm of the position (within 1e-6 m)
        - snr is non-negative
        - labels are 0/1

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if len(self.points):
            norms = np.linalg.norm(self.positions, axis=1)
            bad_range = np.nonzero(np.abs(norms - self.points[:, 5]) > RANGE_TOLERANCE)[0]
            if len(bad_range):
                errors.append(f"range mismatch at points {bad_range[:5].tolist()}")
            bad_snr = np.nonzero(self.points[:, 4] < 0)[0]
            if len(bad_snr):
                errors.append(f"negative snr at points {bad_snr[:5].tolist()}")
        if self.labels is not None and not np.all(np.isin(self.labels, (0, 1))):
            errors.append("labels must be 0 or 1")
        return len(errors) == 0, errors
