"""
Boundary Segmentation Network

Two set-abstraction stages downsample the fused cloud (sample, group, shared
MLP, max-pool); two feature-propagation stages interpolate features back to
every input point; a small head turns each point's feature into a boundary
probability.

    features (n,12) -> SA1 (m1,64) -> SA2 (m2,128) -> FP1 (m1,64) -> FP2 (n,64) -> head (n,)

Input: FeatureCloud
Output: Per-point probabilities in (0, 1)
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple
import hashlib
import json
import logging

import numpy as np
from scipy.sparse import csr_matrix
from scipy.special import expit

from src.module2_sim.dataset_io import PathLike, atomic_output
from src.module3_preprocess.fusion import FEATURE_WIDTH, FeatureCloud
from src.module4_segnet.layers import DenseCache, Params, init_mlp, mlp_backward, mlp_forward
from src.module4_segnet.losses import LossConfig, total_loss_and_grad
from src.module4_segnet.pointnet_ops import farthest_point_sample, grouped_indices, interpolation_weights
from src.seeding import TRAIN_STREAM, substream

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1

# Column divisors, FEATURE_COLUMNS order
FEATURE_SCALE = np.array([10.0, 10.0, 10.0, 10.0, 30.0, 50.0, 20.0, 0.2, 2.0, 5.0, 5.0, 1.0])

# Keeps outputs strictly inside (0, 1) once the logit saturates
PROB_FLOOR = 1e-12


@dataclass
class SegModelConfig:
    """Layer sizes of the network."""
    sa1_centroids: int = 512
    sa1_radius: float = 2.0
    sa1_k: int = 16
    sa1_mlp: Tuple[int, ...] = (32, 32, 64)
    sa2_centroids: int = 128
    sa2_radius: float = 4.0
    sa2_k: int = 16
    sa2_mlp: Tuple[int, ...] = (64, 64, 128)
    fp1_mlp: Tuple[int, ...] = (128, 64)
    fp2_mlp: Tuple[int, ...] = (64, 64)
    head_mlp: Tuple[int, ...] = (32,)

    def validate(self) -> Tuple[bool, List[str]]:
        errors = []
        for name in ("sa1_centroids", "sa1_k", "sa2_centroids", "sa2_k"):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be >= 1")
        for name in ("sa1_radius", "sa2_radius"):
            if getattr(self, name) <= 0:
                errors.append(f"{name} must be > 0")
        for name in ("sa1_mlp", "sa2_mlp", "fp1_mlp", "fp2_mlp", "head_mlp"):
            widths = getattr(self, name)
            if not widths or any(w < 1 for w in widths):
                errors.append(f"{name} needs at least one positive width")
        return len(errors) == 0, errors

    def stacks(self) -> Dict[str, Tuple[int, ...]]:
        """Full width chain of every layer stack, inputs included."""
        return {
            "sa1": (FEATURE_WIDTH,) + tuple(self.sa1_mlp),
            "sa2": (3 + self.sa1_mlp[-1],) + tuple(self.sa2_mlp),
            "fp1": (self.sa2_mlp[-1] + self.sa1_mlp[-1],) + tuple(self.fp1_mlp),
            "fp2": (self.fp1_mlp[-1] + FEATURE_WIDTH,) + tuple(self.fp2_mlp),
            "head": (self.fp2_mlp[-1],) + tuple(self.head_mlp) + (1,),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SegModelConfig":
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})


@dataclass
class SegModel:
    """Network configuration plus its named parameter tensors."""
    config: SegModelConfig
    params: Params = field(default_factory=dict)

    @classmethod
    def initialize(cls, config: Optional[SegModelConfig] = None, seed: int = 0) -> "SegModel":
        """He-initialized weights drawn from the train substream; zero biases."""
        config = config or SegModelConfig()
        ok, errors = config.validate()
        if not ok:
            raise ValueError("; ".join(errors))
        rng = substream(seed, TRAIN_STREAM, 0)
        params: Params = {}
        for prefix, widths in config.stacks().items():
            init_mlp(params, prefix, widths, rng)
        return cls(config=config, params=params)

    def n_layers(self, prefix: str) -> int:
        return len(self.config.stacks()[prefix]) - 1

    def parameter_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def copy(self) -> "SegModel":
        return SegModel(config=self.config, params={k: v.copy() for k, v in self.params.items()})

    def validate(self) -> Tuple[bool, List[str]]:
        """Check the shape chain and finiteness of every tensor."""
        errors = []
        for prefix, widths in self.config.stacks().items():
            for i, (fan_in, fan_out) in enumerate(zip(widths, widths[1:])):
                w = self.params.get(f"{prefix}.{i}.weight")
                b = self.params.get(f"{prefix}.{i}.bias")
                if w is None or w.shape != (fan_in, fan_out):
                    errors.append(f"{prefix}.{i}.weight should be {(fan_in, fan_out)}")
                if b is None or b.shape != (fan_out,):
                    errors.append(f"{prefix}.{i}.bias should be {(fan_out,)}")
        for name, tensor in self.params.items():
            if not np.all(np.isfinite(tensor)):
                errors.append(f"{name} has non-finite values")
        return len(errors) == 0, errors


@dataclass
class ForwardCache:
    """Intermediates of one forward pass, consumed by backward_from_probs."""
    probs: np.ndarray
    sa1_caches: List[DenseCache]
    sa1_out: np.ndarray
    sa1_argmax: np.ndarray
    sa2_caches: List[DenseCache]
    sa2_out: np.ndarray
    sa2_argmax: np.ndarray
    sa2_gather: csr_matrix
    fp1_caches: List[DenseCache]
    fp1_interp: csr_matrix
    fp2_caches: List[DenseCache]
    fp2_interp: csr_matrix
    head_caches: List[DenseCache]

    def signature(self) -> str:
        """Digest of every ReLU mask and max-pool winner."""
        digest = hashlib.sha1()
        for caches in (self.sa1_caches, self.sa2_caches, self.fp1_caches, self.fp2_caches, self.head_caches):
            for cache in caches:
                digest.update(np.packbits(cache.active).tobytes())
        digest.update(self.sa1_argmax.tobytes())
        digest.update(self.sa2_argmax.tobytes())
        return digest.hexdigest()


def _max_pool(h: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    winner = np.argmax(h, axis=1)
    return np.take_along_axis(h, winner[:, None, :], axis=1)[:, 0, :], winner


def _unpool(d_pooled: np.ndarray, winner: np.ndarray, k: int) -> np.ndarray:
    d_h = np.zeros((winner.shape[0], k, winner.shape[1]))
    np.put_along_axis(d_h, winner[:, None, :], d_pooled[:, None, :], axis=1)
    return d_h


def _interpolation_matrix(nearest: np.ndarray, weights: np.ndarray, n_sources: int) -> csr_matrix:
    """(n_queries, n_sources) operator; row i mixes the sources of query i."""
    rows = np.repeat(np.arange(len(nearest)), nearest.shape[1])
    return csr_matrix((weights.ravel(), (rows, nearest.ravel())), shape=(len(nearest), n_sources))


def _gather_matrix(groups: np.ndarray, n_sources: int) -> csr_matrix:
    """One-hot (m * k, n_sources) operator picking the rows of every group slot."""
    flat = groups.ravel()
    return csr_matrix((np.ones(len(flat)), (np.arange(len(flat)), flat)), shape=(len(flat), n_sources))


def forward_with_cache(model: SegModel, cloud: FeatureCloud) -> Tuple[np.ndarray, ForwardCache]:
    """
    forward, also returning the intermediates backward needs.

    Raises:
        ValueError: "empty cloud" for a cloud without points
    """
    n = len(cloud)
    if n == 0:
        raise ValueError("empty cloud")
    cfg, params = model.config, model.params
    xyz = cloud.features[:, :3]
    scaled = cloud.features / FEATURE_SCALE

    # SA1: all fused features, neighbor coordinates relative to the centroid
    m1 = min(cfg.sa1_centroids, n)
    c1_xyz = xyz[farthest_point_sample(xyz, m1)]
    g1, _ = grouped_indices(c1_xyz, xyz, cfg.sa1_radius, cfg.sa1_k)
    rel1 = (xyz[g1] - c1_xyz[:, None, :]) / cfg.sa1_radius
    h1, sa1_caches = mlp_forward(params, "sa1", model.n_layers("sa1"),
                                 np.concatenate([rel1, scaled[g1][..., 3:]], axis=2))
    f1, a1 = _max_pool(h1)

    # SA2
    m2 = min(cfg.sa2_centroids, m1)
    c2_xyz = c1_xyz[farthest_point_sample(c1_xyz, m2)]
    g2, _ = grouped_indices(c2_xyz, c1_xyz, cfg.sa2_radius, cfg.sa2_k)
    rel2 = (c1_xyz[g2] - c2_xyz[:, None, :]) / cfg.sa2_radius
    h2, sa2_caches = mlp_forward(params, "sa2", model.n_layers("sa2"),
                                 np.concatenate([rel2, f1[g2]], axis=2))
    f2, a2 = _max_pool(h2)

    # FP1: SA2 features back onto SA1 centroids, skip-linked with SA1 features
    interp1 = _interpolation_matrix(*interpolation_weights(c1_xyz, c2_xyz), m2)
    u1, fp1_caches = mlp_forward(params, "fp1", model.n_layers("fp1"),
                                 np.concatenate([interp1 @ f2, f1], axis=1))

    # FP2: back onto every input point, skip-linked with the input features
    interp2 = _interpolation_matrix(*interpolation_weights(xyz, c1_xyz), m1)
    u2, fp2_caches = mlp_forward(params, "fp2", model.n_layers("fp2"),
                                 np.concatenate([interp2 @ u1, scaled], axis=1))

    logits, head_caches = mlp_forward(params, "head", model.n_layers("head"), u2, final_relu=False)
    probs = np.clip(expit(logits[:, 0]), PROB_FLOOR, 1.0 - PROB_FLOOR)

    cache = ForwardCache(
        probs=probs,
        sa1_caches=sa1_caches, sa1_out=f1, sa1_argmax=a1,
        sa2_caches=sa2_caches, sa2_out=f2, sa2_argmax=a2, sa2_gather=_gather_matrix(g2, m1),
        fp1_caches=fp1_caches, fp1_interp=interp1,
        fp2_caches=fp2_caches, fp2_interp=interp2,
        head_caches=head_caches,
    )
    return probs, cache


def forward(model: SegModel, cloud: FeatureCloud) -> np.ndarray:
    """Boundary probability of every point of the cloud."""
    return forward_with_cache(model, cloud)[0]


def backward_from_probs(model: SegModel, cache: ForwardCache, d_probs: np.ndarray) -> Params:
    """
    Reverse pass given dL/dprobs.

    Max-pool gradients go to the winning group member; interpolation weights
    depend only on coordinates and are constants here.
    """
    cfg, params = model.config, model.params
    grads: Params = {name: np.zeros_like(p) for name, p in params.items()}
    p = cache.probs

    d_logits = (d_probs * p * (1.0 - p))[:, None]
    d_u2 = mlp_backward(params, "head", cache.head_caches, d_logits, grads)

    d_fp2_in = mlp_backward(params, "fp2", cache.fp2_caches, d_u2, grads)
    width_u1 = cfg.fp1_mlp[-1]
    d_u1 = cache.fp2_interp.T @ d_fp2_in[:, :width_u1]

    d_fp1_in = mlp_backward(params, "fp1", cache.fp1_caches, d_u1, grads)
    width_f2 = cfg.sa2_mlp[-1]
    d_f2 = cache.fp1_interp.T @ d_fp1_in[:, :width_f2]
    d_f1 = d_fp1_in[:, width_f2:].copy()

    d_sa2_in = mlp_backward(params, "sa2", cache.sa2_caches,
                            _unpool(d_f2, cache.sa2_argmax, cfg.sa2_k), grads)
    d_f1 += cache.sa2_gather.T @ d_sa2_in[..., 3:].reshape(-1, d_f1.shape[1])

    mlp_backward(params, "sa1", cache.sa1_caches, _unpool(d_f1, cache.sa1_argmax, cfg.sa1_k), grads)
    return grads


def backward(model: SegModel, cloud: FeatureCloud, labels: np.ndarray,
             loss_cfg: Optional[LossConfig] = None) -> Tuple[float, Params]:
    """
    Total loss of the cloud and its gradient w.r.t. every parameter.

    Returns:
        (loss, grads) with grads keyed like model.params
    """
    probs, cache = forward_with_cache(model, cloud)
    loss, d_probs = total_loss_and_grad(probs, labels, cloud.positions, loss_cfg or LossConfig())
    return loss, backward_from_probs(model, cache, d_probs)


def save_checkpoint(model: SegModel, path: PathLike, arm: Optional[Dict[str, Any]] = None) -> None:
    """
    Write the model as a versioned JSON container of named tensors.

    Raises:
        ValueError: if any tensor is malformed or non-finite
    """
    ok, errors = model.validate()
    if not ok:
        raise ValueError("; ".join(errors))
    document = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "config": model.config.to_dict(),
        "arm": arm or {},
        "tensors": {
            name: {"shape": list(tensor.shape), "data": tensor.ravel().tolist()}
            for name, tensor in sorted(model.params.items())
        },
    }
    with atomic_output(path) as handle:
        json.dump(document, handle, separators=(",", ":"))
    logger.info("saved %d parameters to %s", model.parameter_count(), path)


def load_checkpoint(path: PathLike) -> Tuple[SegModel, Dict[str, Any]]:
    """
    Read a checkpoint written by save_checkpoint.

    Returns:
        (model, arm) where arm holds the training flags stored with it
    """
    with open(path, "r", encoding="utf-8") as handle:
        document = json.load(handle)
    version = document.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format {version!r}")
    params = {
        name: np.asarray(entry["data"], dtype=float).reshape(entry["shape"])
        for name, entry in document["tensors"].items()
    }
    model = SegModel(config=SegModelConfig.from_dict(document["config"]), params=params)
    ok, errors = model.validate()
    if not ok:
        raise ValueError("; ".join(errors))
    return model, document.get("arm", {})
