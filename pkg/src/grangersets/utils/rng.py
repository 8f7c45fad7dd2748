"""
Seeded random substreams.

Every random draw in the package comes from a ``numpy.random.Generator``
(PCG64 bit generator, ziggurat normals) built from a ``SeedSequence`` whose
spawn key names the unit of work. The same ``(seed, keys)`` always yields the
same stream, whichever process or worker builds it.
"""

from typing import Union

import numpy as np

# stream tags used as the last spawn-key component
PANEL_STREAM = 0
BOOTSTRAP_STREAM = 1

SeedLike = Union[int, np.integer]


def _sequence(seed: SeedLike, keys) -> np.random.SeedSequence:
    if int(seed) < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    spawn_key = tuple(int(k) for k in keys)
    if any(k < 0 for k in spawn_key):
        raise ValueError(f"substream keys must be non-negative, got {spawn_key}")
    return np.random.SeedSequence(int(seed), spawn_key=spawn_key)


def substream(seed: SeedLike, *keys: int) -> np.random.Generator:
    """Generator for the unit of work identified by ``keys`` under ``seed``."""
    return np.random.Generator(np.random.PCG64(_sequence(seed, keys)))


def derive_seed(seed: SeedLike, *keys: int) -> int:
    """A 63-bit integer seed for a nested component."""
    state = _sequence(seed, keys).generate_state(1, dtype=np.uint64)[0]
    return int(state) >> 1
