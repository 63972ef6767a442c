"""
Named random substreams derived from a single root seed.

Every component draws from its own stream ("sim", "train", "subsample", ...)
so a component can be rerun in isolation and still see the same numbers.
"""

import zlib
from typing import Union

import numpy as np

SIM_STREAM = "sim"
TRAIN_STREAM = "train"
SUBSAMPLE_STREAM = "subsample"


def substream(root_seed: int, name: str, *extra: int) -> np.random.Generator:
    """
    Return a Generator keyed by (root_seed, name, *extra).

    Args:
        root_seed: Root seed of the run
        name: Stream name; hashed with CRC32 so it is stable across interpreters
        extra: Additional integer keys (e.g. a frame index)

    Returns:
        Independent numpy Generator
    """
    key = [int(root_seed) & 0xFFFFFFFF, zlib.crc32(name.encode("utf-8"))]
    key.extend(int(e) & 0xFFFFFFFF for e in extra)
    return np.random.default_rng(np.random.SeedSequence(key))


def as_generator(rng: Union[None, int, np.random.Generator], name: str = SIM_STREAM) -> np.random.Generator:
    """Accept a Generator, an int seed, or None (seed 0) and return a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return substream(0 if rng is None else int(rng), name)
