"""
Multi-Frame Fusion and Point-Wise Features

Fuses the current frame with up to two previous frames. Previous frames are
motion-compensated into the current ego frame; every row records the frame it
came from (0 = current, 1 = previous, 2 = the one before). Doppler, SNR and
range stay as measured in the source frame; the current frame's ego speed and
yaw rate are attached to every row.

Feature row layout (FEATURE_COLUMNS):
    x, y, z, doppler, snr, range, ego_speed, yaw_rate,
    frame_index, dev_x, dev_y, prev_prob

Input: Current RadarFrame and optional previous frames
Output: FeatureCloud
"""

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple
import logging

import numpy as np

from src.module1_core.geometry import motion_compensate
from src.module1_core.radar_types import EgoPose, EgoState, RadarFrame
from src.module2_sim.scenario import FRAME_PERIOD
from src.module3_preprocess.filters import FilterConfig, filter_mask

logger = logging.getLogger(__name__)

FEATURE_COLUMNS: Tuple[str, ...] = (
    "x", "y", "z", "doppler", "snr", "range", "ego_speed", "yaw_rate",
    "frame_index", "dev_x", "dev_y", "prev_prob",
)
FEATURE_WIDTH = len(FEATURE_COLUMNS)
COL = {name: i for i, name in enumerate(FEATURE_COLUMNS)}
TEMPORAL_SLICE = slice(COL["dev_x"], COL["prev_prob"] + 1)
DEFAULT_TEMPORAL = (0.0, 0.0, 0.5)


@dataclass
class FeaturePoint:
    """One fused row, in readable form."""
    x: float
    y: float
    z: float
    doppler: float
    snr: float
    range: float
    ego_speed: float
    yaw_rate: float
    frame_index: int
    dev_x: float = 0.0
    dev_y: float = 0.0
    prev_prob: float = 0.5
    label: Optional[int] = None


@dataclass
class FeatureCloud:
    """
    Per-point feature matrix for the segmentation network.

    features: (n, 12) in FEATURE_COLUMNS order
    labels: optional (n,) 0/1 ground truth
    source_rows: (n,) row index of each point in its source frame
    """
    features: np.ndarray
    labels: Optional[np.ndarray] = None
    source_rows: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.features)

    @property
    def positions(self) -> np.ndarray:
        return self.features[:, :3]

    @property
    def frame_index(self) -> np.ndarray:
        return self.features[:, COL["frame_index"]].astype(np.int64)

    def point(self, i: int) -> FeaturePoint:
        row = self.features[i]
        label = None if self.labels is None else int(self.labels[i])
        values = [float(v) for v in row]
        values[COL["frame_index"]] = int(row[COL["frame_index"]])
        return FeaturePoint(*values, label=label)

    def with_temporal(self, temporal: np.ndarray) -> "FeatureCloud":
        """Copy with the (dev_x, dev_y, prev_prob) columns replaced."""
        features = self.features.copy()
        features[:, TEMPORAL_SLICE] = temporal
        return replace(self, features=features)

    def subset(self, index: np.ndarray) -> "FeatureCloud":
        return FeatureCloud(
            features=self.features[index],
            labels=None if self.labels is None else self.labels[index],
            source_rows=None if self.source_rows is None else self.source_rows[index],
        )


def _rows(frame: RadarFrame, frame_index: int, current: EgoState) -> np.ndarray:
    positions = frame.positions
    if frame_index:
        positions = motion_compensate(positions, frame.ego.pose, current.pose)
    n = len(positions)
    block = np.empty((n, FEATURE_WIDTH))
    block[:, 0:3] = positions
    block[:, 3:6] = frame.points[:, 3:6]
    block[:, COL["ego_speed"]] = current.speed
    block[:, COL["yaw_rate"]] = current.yaw_rate
    block[:, COL["frame_index"]] = frame_index
    block[:, TEMPORAL_SLICE] = DEFAULT_TEMPORAL
    return block


def fuse_frames(curr: RadarFrame, prev1: Optional[RadarFrame] = None,
                prev2: Optional[RadarFrame] = None,
                filter_cfg: Optional[FilterConfig] = None) -> FeatureCloud:
    """
    Fuse up to three consecutive frames into one FeatureCloud.

    Args:
        curr: Current frame
        prev1: Previous frame (optional)
        prev2: Frame before prev1 (optional)
        filter_cfg: When given, each source frame is filtered with its own ego
                    state before compensation

    Returns:
        FeatureCloud; labels present only if every contributing frame is labeled

    Raises:
        ValueError: if timestamps are not strictly increasing
    """
    stamps = [f.timestamp for f in (prev2, prev1, curr) if f is not None]
    if any(b <= a for a, b in zip(stamps, stamps[1:])):
        raise ValueError(f"out-of-order timestamps {stamps}")

    blocks, labels, sources = [], [], []
    labeled = True
    for frame_index, frame in enumerate((curr, prev1, prev2)):
        if frame is None:
            continue
        rows = np.arange(len(frame))
        if filter_cfg is not None:
            keep = filter_mask(frame, filter_cfg)
            frame, rows = frame.subset(keep), rows[keep]
        blocks.append(_rows(frame, frame_index, curr.ego))
        sources.append(rows)
        if frame.labels is None:
            labeled = False
        else:
            labels.append(frame.labels)

    features = np.vstack(blocks) if blocks else np.zeros((0, FEATURE_WIDTH))
    cloud = FeatureCloud(
        features=features,
        labels=np.concatenate(labels) if labeled else None,
        source_rows=np.concatenate(sources),
    )
    logger.debug("fused %d frames into %d points", len(blocks), len(cloud))
    return cloud


def flip_pose(pose: EgoPose) -> EgoPose:
    """Mirror a world pose across the world y axis."""
    return EgoPose(-pose.x_world, pose.y_world, -pose.yaw)


def flip_augment(frame: RadarFrame) -> RadarFrame:
    """
    Mirror a frame left-right (x -> -x).

    The yaw rate and the pose are mirrored too, so motion compensation between
    flipped frames stays consistent. Doppler, SNR, range, z, speed and labels
    are unchanged. flip_augment(flip_augment(f)) == f.
    """
    points = frame.points.copy()
    points[:, 0] = -points[:, 0]
    ego = EgoState(flip_pose(frame.ego.pose), frame.ego.speed, -frame.ego.yaw_rate)
    return replace(
        frame,
        ego=ego,
        points=points,
        labels=None if frame.labels is None else frame.labels.copy(),
        sources=None if frame.sources is None else frame.sources.copy(),
    )


def split_sequences(frames: List[RadarFrame], period: float = FRAME_PERIOD) -> List[List[RadarFrame]]:
    """
    Cut a frame list into contiguous sequences.

    A new sequence starts wherever the timestamp does not advance by one
    radar period (within half a period).
    """
    sequences: List[List[RadarFrame]] = []
    for frame in frames:
        if sequences:
            step = frame.timestamp - sequences[-1][-1].timestamp
            if abs(step - period) <= 0.5 * period:
                sequences[-1].append(frame)
                continue
        sequences.append([frame])
    return sequences
