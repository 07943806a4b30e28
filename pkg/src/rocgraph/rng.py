"""Counter-based pseudorandom substreams.

Every stream is Philox4x64-10 keyed by the 128-bit pair ``(seed, tag)``.
A generator round ``r`` uses ``tag = r``; auxiliary draws (shuffles, the
community-size vector, ...) use tags in a reserved high range so they never
collide with round indices. Because a stream depends only on its key, rounds
can be produced in any order or on any thread with identical output.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# Auxiliary tag domain: top byte of the tag word.
AUX = 0xA5 << 56
TAG_ASSIGN = AUX | 1
TAG_TARGETS = AUX | 2
TAG_MAIN = AUX | 3


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def substream(seed: int, tag: int) -> np.random.Generator:
    key = (int(seed) & MASK64) | ((int(tag) & MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def replication_seed(seed: int, index: int) -> int:
    """Seed for replication ``index`` of an experiment started at ``seed``."""
    return (int(seed) + int(index)) & MASK64
