"""Named random-number streams.

All stochastic choices in the package draw from Philox counter-based
generators keyed by (seed, stream id).  Keeping the streams separate means
e.g. switching network architecture (different parameter count, different
number of init draws) cannot perturb the collocation point sets, and the
PCGrad permutation sequence is independent of both.
"""

from __future__ import annotations

import numpy as np

STREAM_SAMPLING = 1
STREAM_INIT = 2
STREAM_PCGRAD = 3


def stream_generator(seed: int, stream: int) -> np.random.Generator:
    """Generator for one (seed, stream) pair.

    The Philox key is 128 bits: the seed fills the low word, the stream id
    the high word, so distinct streams are distinct keys rather than
    jump-ahead offsets.
    """
    if seed < 0:
        raise ValueError("seed must be non-negative")
    key = (int(seed) & 0xFFFFFFFFFFFFFFFF) | (int(stream) << 64)
    return np.random.Generator(np.random.Philox(key=key))
