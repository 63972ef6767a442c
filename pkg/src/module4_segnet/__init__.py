"""
Module 4: Boundary Segmentation Network

A compact set-abstraction / feature-propagation network scoring every fused
radar point as road boundary or not, trained with binary cross-entropy plus a
distance loss, and run frame to frame with deviation features.

Topics: Point-set sampling and grouping, reverse-mode gradients, Adam,
recurrent temporal features

Public API:
- farthest_point_sample, ball_query: point-set operations
- SegModel, SegModelConfig, forward, backward: the network
- LossConfig, bce_loss, distance_loss, total_loss: losses
- TrainConfig, train: training
- Detection, deviation_features, run_sequence: sequential inference
- save_checkpoint, load_checkpoint: model files
"""

from src.module4_segnet.pointnet_ops import (
    ball_query,
    farthest_point_sample,
    grouped_indices,
    interpolation_weights,
)
from src.module4_segnet.losses import (
    LossConfig,
    bce_loss,
    distance_loss,
    total_loss,
    total_loss_and_grad,
)
from src.module4_segnet.model import (
    FEATURE_SCALE,
    SegModel,
    SegModelConfig,
    backward,
    backward_from_probs,
    forward,
    forward_with_cache,
    load_checkpoint,
    save_checkpoint,
)
from src.module4_segnet.temporal import (
    DETECTION_THRESHOLD,
    Detection,
    attach_temporal,
    deviation_features,
    infer_frame,
    run_sequence,
)
from src.module4_segnet.training import Adam, TrainConfig, arm_flags, train

__all__ = [
    "ball_query",
    "farthest_point_sample",
    "grouped_indices",
    "interpolation_weights",
    "LossConfig",
    "bce_loss",
    "distance_loss",
    "total_loss",
    "total_loss_and_grad",
    "FEATURE_SCALE",
    "SegModel",
    "SegModelConfig",
    "backward",
    "backward_from_probs",
    "forward",
    "forward_with_cache",
    "load_checkpoint",
    "save_checkpoint",
    "DETECTION_THRESHOLD",
    "Detection",
    "attach_temporal",
    "deviation_features",
    "infer_frame",
    "run_sequence",
    "Adam",
    "TrainConfig",
    "arm_flags",
    "train",
]
