"""Reproducible per-path random streams.

Every path (or sample) is identified by a root seed and an integer index.
The pair is mapped through :class:`numpy.random.SeedSequence` spawn keys to a
counter-based Philox generator, so path ``i`` sees the same numbers no matter
how a batch is split across workers or chunks.
"""

from __future__ import annotations

import numpy as np

# Sub-stream identifiers within one path.
INCREMENTS = 0
BRIDGE = 1
AUX = 2


def stream(root: int, index: int = 0, sub: int = INCREMENTS) -> np.random.Generator:
    """Return the generator for sub-stream ``sub`` of path ``index``."""
    if root < 0 or index < 0:
        raise ValueError("seed components must be non-negative")
    seq = np.random.SeedSequence(int(root), spawn_key=(int(index), int(sub)))
    return np.random.Generator(np.random.Philox(seq))


def normalize_seed(seed) -> tuple[int, int]:
    """Accept ``int`` or ``(root, index)`` and return ``(root, index)``."""
    if isinstance(seed, (tuple, list)):
        root, index = seed
        return int(root), int(index)
    return int(seed), 0


def derive(seed: int, tag: int) -> int:
    """A new root seed for an independent batch labelled ``tag``."""
    return int(np.random.SeedSequence([int(seed), 0x5EED, int(tag)]).generate_state(1, np.uint64)[0] >> 1)
