"""Named, independent random substreams derived from one root seed.

Every source of randomness in a run (arrival epochs, entanglement
generation delays, per-qubit syndrome draws, batch tie-break shuffles)
gets its own generator, keyed by a stream tag plus optional entity ids.
Runs that share a root seed therefore expose identical exogenous
randomness to every scheduling policy, which is what makes paired
policy comparisons and replay-based checks exact.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "STREAM_ARRIVALS",
    "STREAM_EPR",
    "STREAM_SYNDROME",
    "STREAM_TIEBREAK",
    "substream",
]

STREAM_ARRIVALS = 1
STREAM_EPR = 2
STREAM_SYNDROME = 3
STREAM_TIEBREAK = 4


def substream(seed: int, tag: int, *entity: int) -> np.random.Generator:
    """Generator for the (tag, *entity) substream of root ``seed``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng(np.random.SeedSequence((seed, tag, *entity)))
