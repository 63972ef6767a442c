"""
Training Loop

One frame per step, Adam updates. The labeled frames are cut into contiguous
sequences; each sequence and its left-right mirrored twin form separate
streams. Streams are visited in a seeded random order every epoch and frames
inside a stream in time order, so the detection of frame t-1 (from its own
training forward pass) provides frame t's deviation features.

Input: Labeled RadarFrames, an initialized SegModel
Output: Trained SegModel and the mean loss of every epoch
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from src.module1_core.radar_types import RadarFrame
from src.module3_preprocess.filters import FilterConfig
from src.module3_preprocess.fusion import FeatureCloud, flip_augment, fuse_frames, split_sequences
from src.module4_segnet.layers import Params
from src.module4_segnet.losses import LossConfig, total_loss_and_grad
from src.module4_segnet.model import SegModel, backward_from_probs, forward_with_cache
from src.module4_segnet.temporal import Detection, attach_temporal
from src.seeding import SUBSAMPLE_STREAM, TRAIN_STREAM, substream

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    epochs: int = 20
    max_points: int = 2048
    seed: int = 0
    use_temporal: bool = True
    augment_flip: bool = True

    def validate(self) -> Tuple[bool, List[str]]:
        errors = []
        if self.lr < 0:
            errors.append("lr must be >= 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            errors.append("betas must be in [0, 1)")
        if self.adam_eps <= 0:
            errors.append("adam_eps must be > 0")
        if self.epochs < 0:
            errors.append("epochs must be >= 0")
        if self.max_points < 64:
            errors.append("max_points must be >= 64")
        return len(errors) == 0, errors


class Adam:
    """Adam with bias correction over a dict of named tensors."""

    def __init__(self, params: Params, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {name: np.zeros_like(p) for name, p in params.items()}
        self.v = {name: np.zeros_like(p) for name, p in params.items()}

    def step(self, params: Params, grads: Params) -> None:
        """Update params in place."""
        self.t += 1
        correct1 = 1.0 - self.beta1 ** self.t
        correct2 = 1.0 - self.beta2 ** self.t
        for name, grad in grads.items():
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * grad
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * grad * grad
            m_hat = self.m[name] / correct1
            v_hat = self.v[name] / correct2
            params[name] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class _Step:
    cloud: FeatureCloud
    frame: RadarFrame


def _build_streams(frames: List[RadarFrame], filter_cfg: FilterConfig, augment_flip: bool) -> List[List[_Step]]:
    sequences = split_sequences(frames)
    if augment_flip:
        sequences = sequences + [[flip_augment(f) for f in seq] for seq in sequences]
    streams = []
    for seq in sequences:
        steps = []
        for i, frame in enumerate(seq):
            cloud = fuse_frames(frame, seq[i - 1] if i >= 1 else None, seq[i - 2] if i >= 2 else None,
                                filter_cfg)
            steps.append(_Step(cloud=cloud, frame=frame))
        streams.append(steps)
    return streams


def train(frames: List[RadarFrame], model: SegModel, train_cfg: Optional[TrainConfig] = None,
          loss_cfg: Optional[LossConfig] = None,
          filter_cfg: Optional[FilterConfig] = None) -> Tuple[SegModel, List[float]]:
    """
    Train a copy of `model` on labeled frames.

    Args:
        frames: Labeled frames (one or more sequences, any order)
        model: Starting point; left untouched
        train_cfg: Optimizer and schedule
        loss_cfg: Loss weights
        filter_cfg: Physical-constraint filters applied before fusion

    Returns:
        (trained model, mean loss per epoch)

    Raises:
        ValueError: on an empty dataset, unlabeled frames or invalid configs
    """
    train_cfg = train_cfg or TrainConfig()
    loss_cfg = loss_cfg or LossConfig()
    filter_cfg = filter_cfg or FilterConfig()
    for cfg in (train_cfg, loss_cfg, filter_cfg):
        ok, errors = cfg.validate()
        if not ok:
            raise ValueError("; ".join(errors))
    if not frames:
        raise ValueError("cannot train on an empty dataset")
    if any(f.labels is None for f in frames):
        raise ValueError("training frames must be labeled")

    streams = _build_streams(frames, filter_cfg, train_cfg.augment_flip)
    trained = model.copy()
    optimizer = Adam(trained.params, train_cfg.lr, train_cfg.beta1, train_cfg.beta2, train_cfg.adam_eps)
    logger.info("training on %d frames in %d streams for %d epochs",
                len(frames), len(streams), train_cfg.epochs)

    trace: List[float] = []
    for epoch in range(train_cfg.epochs):
        order = substream(train_cfg.seed, TRAIN_STREAM, epoch + 1).permutation(len(streams))
        subsample_rng = substream(train_cfg.seed, SUBSAMPLE_STREAM, epoch)
        losses = []
        for stream_index in order:
            prev: Optional[Detection] = None
            for step in streams[stream_index]:
                pose = step.frame.ego.pose
                cloud = step.cloud
                if len(cloud) == 0:
                    prev = Detection.empty(pose)
                    continue
                if len(cloud) > train_cfg.max_points:
                    keep = np.sort(subsample_rng.choice(len(cloud), train_cfg.max_points, replace=False))
                    cloud = cloud.subset(keep)
                cloud = attach_temporal(cloud, prev, pose, train_cfg.use_temporal)

                probs, cache = forward_with_cache(trained, cloud)
                loss, d_probs = total_loss_and_grad(probs, cloud.labels, cloud.positions, loss_cfg)
                optimizer.step(trained.params, backward_from_probs(trained, cache, d_probs))
                losses.append(loss)
                prev = Detection.from_cloud(cloud, probs, pose)
        mean_loss = float(np.mean(losses)) if losses else 0.0
        trace.append(mean_loss)
        logger.info("epoch %d/%d: mean loss %.5f over %d steps", epoch + 1, train_cfg.epochs, mean_loss, len(losses))
    return trained, trace


def arm_flags(train_cfg: TrainConfig, loss_cfg: LossConfig) -> Dict[str, object]:
    """Training flags stored with a checkpoint; `name` identifies the ablation arm."""
    if not train_cfg.use_temporal:
        name = "no_temporal"
    elif loss_cfg.lambda_dist == 0:
        name = "no_distance_loss"
    else:
        name = "full"
    return {
        "name": name,
        "use_temporal": train_cfg.use_temporal,
        "lambda_dist": loss_cfg.lambda_dist,
        "seed": train_cfg.seed,
        "epochs": train_cfg.epochs,
    }
