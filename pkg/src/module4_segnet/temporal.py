"""
Recurrent Deviation Features

A frame's detection feeds the next frame: previously detected boundary points
are motion-compensated into the current ego frame and every current point gets
the vector from its nearest compensated boundary point to itself, plus that
neighbor's probability. Points far from last frame's boundary carry a large
deviation, which lets the network suppress false detections that would
otherwise propagate from frame to frame.

Input: Current FeatureCloud, previous Detection, both poses
Output: (dev_x, dev_y, prev_prob) per point; Detection per frame
"""

from dataclasses import dataclass
from typing import List, Optional
import logging

import numpy as np

from src.module1_core.geometry import motion_compensate, nearest_neighbor
from src.module1_core.radar_types import EgoPose, RadarFrame
from src.module3_preprocess.filters import FilterConfig
from src.module3_preprocess.fusion import DEFAULT_TEMPORAL, FeatureCloud, fuse_frames
from src.module4_segnet.model import SegModel, forward

logger = logging.getLogger(__name__)

DETECTION_THRESHOLD = 0.5


@dataclass
class Detection:
    """
    Scored points of one frame, in that frame's ego coordinates.

    probabilities: (n,) boundary probability per point
    coords: (n, 3) positions the probabilities belong to
    pose: Ego pose of the frame the coordinates are expressed in
    frame_index / source_rows: provenance of each point in the fused cloud
    """
    probabilities: np.ndarray
    coords: np.ndarray
    pose: EgoPose
    frame_index: Optional[np.ndarray] = None
    source_rows: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.probabilities)

    @classmethod
    def empty(cls, pose: EgoPose) -> "Detection":
        return cls(np.zeros(0), np.zeros((0, 3)), pose, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def from_cloud(cls, cloud: FeatureCloud, probabilities: np.ndarray, pose: EgoPose) -> "Detection":
        return cls(
            probabilities=np.asarray(probabilities, dtype=float),
            coords=cloud.positions.copy(),
            pose=pose,
            frame_index=cloud.frame_index,
            source_rows=cloud.source_rows,
        )

    @property
    def labels(self) -> np.ndarray:
        return (self.probabilities > DETECTION_THRESHOLD).astype(np.int64)

    @property
    def boundary_coords(self) -> np.ndarray:
        return self.coords[self.probabilities > DETECTION_THRESHOLD]

    @property
    def boundary_probs(self) -> np.ndarray:
        return self.probabilities[self.probabilities > DETECTION_THRESHOLD]

    def current_frame_probabilities(self, n_raw: int) -> np.ndarray:
        """
        Probability of each raw point of the current frame.

        Points that did not reach the network (filtered out) score 0.
        """
        probs = np.zeros(n_raw)
        if self.frame_index is None or self.source_rows is None:
            raise ValueError("detection has no point provenance")
        current = self.frame_index == 0
        probs[self.source_rows[current]] = self.probabilities[current]
        return probs


def default_temporal(n: int) -> np.ndarray:
    return np.tile(np.asarray(DEFAULT_TEMPORAL, dtype=float), (n, 1))


def deviation_features(curr_coords: np.ndarray, prev_detection: Optional[Detection],
                       pose_prev: Optional[EgoPose] = None,
                       pose_curr: Optional[EgoPose] = None) -> np.ndarray:
    """
    (dev_x, dev_y, prev_prob) for every current point.

    Args:
        curr_coords: (n, 2|3) current points in the current ego frame
        prev_detection: Last frame's detection, or None on the first frame
        pose_prev: Pose of prev_detection's frame (defaults to prev_detection.pose)
        pose_curr: Current pose (defaults to pose_prev, i.e. no motion)

    Returns:
        (n, 3); all rows (0, 0, 0.5) when there is no previous boundary
    """
    curr_coords = np.asarray(curr_coords, dtype=float)
    n = len(curr_coords)
    if prev_detection is None or n == 0:
        return default_temporal(n)
    boundary = prev_detection.boundary_coords
    if len(boundary) == 0:
        return default_temporal(n)

    pose_prev = pose_prev or prev_detection.pose
    pose_curr = pose_curr or pose_prev
    compensated = motion_compensate(boundary[:, :2], pose_prev, pose_curr)
    nn = nearest_neighbor(curr_coords[:, :2], compensated)
    out = np.empty((n, 3))
    out[:, 0:2] = nn.vector
    out[:, 2] = prev_detection.boundary_probs[nn.index]
    return out


def attach_temporal(cloud: FeatureCloud, prev_detection: Optional[Detection], pose_curr: EgoPose,
                    use_temporal: bool = True) -> FeatureCloud:
    """Cloud with its temporal columns filled from the previous detection."""
    if not use_temporal:
        return cloud.with_temporal(default_temporal(len(cloud)))
    return cloud.with_temporal(deviation_features(cloud.positions, prev_detection, None, pose_curr))


def infer_frame(model: SegModel, frame: RadarFrame, prev1: Optional[RadarFrame],
                prev2: Optional[RadarFrame], prev_detection: Optional[Detection],
                filter_cfg: FilterConfig, use_temporal: bool = True) -> Detection:
    """Filter, fuse, attach temporal features and score one frame."""
    cloud = fuse_frames(frame, prev1, prev2, filter_cfg)
    if len(cloud) == 0:
        return Detection.empty(frame.ego.pose)
    cloud = attach_temporal(cloud, prev_detection, frame.ego.pose, use_temporal)
    return Detection.from_cloud(cloud, forward(model, cloud), frame.ego.pose)


def run_sequence(model: SegModel, frames: List[RadarFrame], filter_cfg: Optional[FilterConfig] = None,
                 use_temporal: bool = True) -> List[Detection]:
    """
    Sequential inference over time-ordered frames.

    Each frame is filtered and fused with its two predecessors, given deviation
    features from the previous detection, scored, and its detection kept for
    the next step. With use_temporal False every frame gets the default
    temporal features, which is plain per-frame inference.
    """
    filter_cfg = filter_cfg or FilterConfig()
    detections: List[Detection] = []
    prev: Optional[Detection] = None
    for i, frame in enumerate(frames):
        prev = infer_frame(
            model, frame,
            frames[i - 1] if i >= 1 else None,
            frames[i - 2] if i >= 2 else None,
            prev, filter_cfg, use_temporal,
        )
        logger.debug("frame t=%.2f: %d points, %d boundary", frame.timestamp, len(prev),
                     len(prev.boundary_coords))
        detections.append(prev)
    return detections
