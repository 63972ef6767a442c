"""
Training Losses

bce_loss       mean binary cross-entropy on clamped probabilities
distance_loss  probability-weighted mean of each point's (clamped, normalized)
               ground-plane distance to the nearest true boundary point
total_loss     bce + lambda_dist * distance

Every loss has a *_grad twin returning dL/dprobs.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.module1_core.geometry import nearest_neighbor


@dataclass
class LossConfig:
    lambda_dist: float = 0.2
    dist_clamp: float = 10.0
    eps: float = 1e-6

    def validate(self) -> Tuple[bool, List[str]]:
        errors = []
        if self.lambda_dist < 0:
            errors.append("lambda_dist must be >= 0")
        if self.dist_clamp <= 0:
            errors.append("dist_clamp must be > 0")
        if not 0 < self.eps < 0.5:
            errors.append("eps must be in (0, 0.5)")
        return len(errors) == 0, errors


def _check_lengths(probs: np.ndarray, labels: np.ndarray) -> None:
    if len(probs) != len(labels):
        raise ValueError(f"{len(probs)} probabilities for {len(labels)} labels")


def bce_loss(probs: np.ndarray, labels: np.ndarray, eps: float = 1e-6) -> float:
    """
    Mean binary cross-entropy.

    Raises:
        ValueError: if the lengths differ
    """
    return bce_loss_and_grad(probs, labels, eps)[0]


def bce_loss_and_grad(probs: np.ndarray, labels: np.ndarray, eps: float = 1e-6) -> Tuple[float, np.ndarray]:
    probs = np.asarray(probs, dtype=float)
    labels = np.asarray(labels, dtype=float)
    _check_lengths(probs, labels)
    if len(probs) == 0:
        return 0.0, np.zeros(0)
    p = np.clip(probs, eps, 1.0 - eps)
    loss = -np.mean(labels * np.log(p) + (1.0 - labels) * np.log(1.0 - p))
    # the clamp is flat outside [eps, 1 - eps]
    inside = (probs > eps) & (probs < 1.0 - eps)
    grad = np.where(inside, (-labels / p + (1.0 - labels) / (1.0 - p)) / len(p), 0.0)
    return float(loss), grad


def normalized_distances(coords: np.ndarray, gt_boundary_coords: np.ndarray, dist_clamp: float) -> np.ndarray:
    """min(ground-plane distance to the nearest GT point, clamp) / clamp."""
    nn = nearest_neighbor(np.asarray(coords, dtype=float)[:, :2],
                          np.asarray(gt_boundary_coords, dtype=float)[:, :2])
    return np.minimum(nn.distance, dist_clamp) / dist_clamp


def distance_loss(probs: np.ndarray, coords: np.ndarray, gt_boundary_coords: np.ndarray,
                  cfg: LossConfig = LossConfig()) -> float:
    """
    Probability-weighted mean normalized distance to the true boundary.

    Returns 0 when there are no true boundary points. The value lies in [0, 1]
    and does not change when every probability is scaled by the same factor.
    """
    return distance_loss_and_grad(probs, coords, gt_boundary_coords, cfg)[0]


def distance_loss_and_grad(probs: np.ndarray, coords: np.ndarray, gt_boundary_coords: np.ndarray,
                           cfg: LossConfig = LossConfig()) -> Tuple[float, np.ndarray]:
    probs = np.asarray(probs, dtype=float)
    if len(probs) == 0 or len(gt_boundary_coords) == 0:
        return 0.0, np.zeros(len(probs))
    d = normalized_distances(coords, gt_boundary_coords, cfg.dist_clamp)
    mass = probs.sum() + cfg.eps
    weighted = float(np.dot(probs, d))
    return weighted / mass, d / mass - weighted / mass ** 2


def total_loss(probs: np.ndarray, labels: np.ndarray, coords: np.ndarray,
               cfg: LossConfig = LossConfig()) -> float:
    """bce + lambda_dist * distance, the true boundary being the label-1 points."""
    return total_loss_and_grad(probs, labels, coords, cfg)[0]


def total_loss_and_grad(probs: np.ndarray, labels: np.ndarray, coords: np.ndarray,
                        cfg: LossConfig = LossConfig()) -> Tuple[float, np.ndarray]:
    labels = np.asarray(labels)
    bce, grad = bce_loss_and_grad(probs, labels, cfg.eps)
    if cfg.lambda_dist == 0:
        return bce, grad
    gt = np.asarray(coords)[labels == 1]
    dist, dist_grad = distance_loss_and_grad(probs, coords, gt, cfg)
    return bce + cfg.lambda_dist * dist, grad + cfg.lambda_dist * dist_grad
