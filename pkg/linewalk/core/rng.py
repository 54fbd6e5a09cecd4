"""
Counter-based random streams.

Environment values and walker randomness are drawn from numpy's Philox
generator. A value never depends on the order in which it was requested:
environment blocks are addressed by (seed, axis tag, block index) and walker
streams by (seed, purpose tag, run index).
"""
import logging
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)

# --- Configuration ---
MASK64 = (1 << 64) - 1
INDEX_BITS = 48
BLOCK_SIZE = 1024
DEFAULT_SEED = 271828

# Purpose tags occupy the top 16 bits of the second key word, so stream-id
# ranges of different purposes never overlap.
STREAM_TAGS = {
    "walk": 1,
    "brownian_b1": 2,
    "brownian_b2": 3,
    "srw": 4,
    "subordinator": 5,
    "sampler": 6,
    "environment": 7,
}

AXIS_TAGS = {
    "horizontal": 0x4C48,
    "vertical": 0x4C56,
    "subordinator": 0x4C53,
}


def stream_key(seed: int, purpose: str, index: int) -> Tuple[int, int]:
    """Returns the Philox key for stream `index` of the given purpose."""
    if purpose not in STREAM_TAGS:
        raise KeyError(f"Unknown stream purpose '{purpose}'")
    if not 0 <= index < (1 << INDEX_BITS):
        raise ValueError(f"Stream index {index} out of range")
    return seed & MASK64, (STREAM_TAGS[purpose] << INDEX_BITS) | index


def _words(*values: int) -> np.ndarray:
    # A plain list holding a word >= 2**63 would be coerced to float64
    return np.array([int(v) & MASK64 for v in values], dtype=np.uint64)


def stream_generator(seed: int, purpose: str, index: int) -> np.random.Generator:
    """Generator for one walker or sampler stream."""
    return np.random.Generator(np.random.Philox(key=_words(*stream_key(seed, purpose, index))))


def block_generator(seed: int, axis: str, block: int) -> np.random.Generator:
    """Generator for environment block `block` (any integer, negative allowed)."""
    key = _words(seed, AXIS_TAGS[axis])
    counter = _words(0, block, 0, 0)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def open_uniform(gen: np.random.Generator, size) -> np.ndarray:
    """Uniform variates strictly inside (0, 1), 53-bit resolution."""
    bits = gen.integers(0, 1 << 53, size=size, dtype=np.uint64)
    return (bits.astype(np.float64) + 0.5) * 2.0 ** -53


def derive_seed(seed: int, *parts: int) -> int:
    """Derives an independent 64-bit seed, e.g. one environment per probe."""
    sequence = np.random.SeedSequence(entropy=seed & MASK64, spawn_key=tuple(int(p) for p in parts))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
