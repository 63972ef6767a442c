"""
Module 3: Point Cloud Preprocessing

Builds point-wise features, removes physically implausible returns, and fuses
three motion-compensated frames.

Topics: Physical-constraint filtering, ego-motion compensation, data augmentation

Public API:
- FilterConfig, height_filter, doppler_filter, filter_frame: noise reduction
- expected_static_doppler: Doppler of a static reflector
- FeatureCloud, FeaturePoint, fuse_frames: fused network input
- flip_augment, split_sequences: training-data helpers
"""

from src.module3_preprocess.filters import (
    FilterConfig,
    doppler_deviation,
    doppler_filter,
    doppler_mask,
    expected_static_doppler,
    filter_frame,
    filter_mask,
    height_filter,
    height_mask,
)
from src.module3_preprocess.fusion import (
    COL,
    DEFAULT_TEMPORAL,
    FEATURE_COLUMNS,
    FEATURE_WIDTH,
    TEMPORAL_SLICE,
    FeatureCloud,
    FeaturePoint,
    flip_augment,
    flip_pose,
    fuse_frames,
    split_sequences,
)

__all__ = [
    "FilterConfig",
    "doppler_deviation",
    "doppler_filter",
    "doppler_mask",
    "expected_static_doppler",
    "filter_frame",
    "filter_mask",
    "height_filter",
    "height_mask",
    "COL",
    "DEFAULT_TEMPORAL",
    "FEATURE_COLUMNS",
    "FEATURE_WIDTH",
    "TEMPORAL_SLICE",
    "FeatureCloud",
    "FeaturePoint",
    "flip_augment",
    "flip_pose",
    "fuse_frames",
    "split_sequences",
]
