"""
Dense Layers with Hand-Written Backward Passes

Parameters live in one flat dict keyed "<stack>.<layer>.weight" /
"<stack>.<layer>.bias" so the optimizer, the checkpoint writer and the
gradient check can all walk the same names.

Each forward returns a cache; the matching backward consumes it, adds the
parameter gradients into a grads dict and returns the input gradient.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

Params = Dict[str, np.ndarray]


@dataclass
class DenseCache:
    inputs: np.ndarray
    active: np.ndarray  # ReLU mask of the outputs, all True when linear


def layer_names(prefix: str, n_layers: int) -> List[Tuple[str, str]]:
    return [(f"{prefix}.{i}.weight", f"{prefix}.{i}.bias") for i in range(n_layers)]


def init_mlp(params: Params, prefix: str, widths: Sequence[int], rng: np.random.Generator) -> None:
    """He-initialize a stack widths[0] -> widths[1] -> ... into params."""
    for i, (fan_in, fan_out) in enumerate(zip(widths, widths[1:])):
        params[f"{prefix}.{i}.weight"] = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out))
        params[f"{prefix}.{i}.bias"] = np.zeros(fan_out)


def mlp_forward(params: Params, prefix: str, n_layers: int, x: np.ndarray,
                final_relu: bool = True) -> Tuple[np.ndarray, List[DenseCache]]:
    """
    Run x (..., in) through a stack of dense layers with ReLU between them.

    Args:
        final_relu: Apply ReLU after the last layer too

    Returns:
        (outputs, caches)
    """
    caches = []
    for i, (w_name, b_name) in enumerate(layer_names(prefix, n_layers)):
        z = x @ params[w_name] + params[b_name]
        if i < n_layers - 1 or final_relu:
            active = z > 0.0
            out = np.where(active, z, 0.0)
        else:
            active = np.ones(z.shape, dtype=bool)
            out = z
        caches.append(DenseCache(inputs=x, active=active))
        x = out
    return x, caches


def mlp_backward(params: Params, prefix: str, caches: List[DenseCache], d_out: np.ndarray,
                 grads: Params) -> np.ndarray:
    """Reverse of mlp_forward; accumulates into grads and returns d(inputs)."""
    names = layer_names(prefix, len(caches))
    for (w_name, b_name), cache in zip(reversed(names), reversed(caches)):
        dz = np.where(cache.active, d_out, 0.0)
        width_in = cache.inputs.shape[-1]
        flat_in = cache.inputs.reshape(-1, width_in)
        flat_dz = dz.reshape(-1, dz.shape[-1])
        grads[w_name] = grads.get(w_name, 0.0) + flat_in.T @ flat_dz
        grads[b_name] = grads.get(b_name, 0.0) + flat_dz.sum(axis=0)
        d_out = dz @ params[w_name].T
    return d_out
