"""Reproducible random streams.

Every random draw in the package goes through a Philox4x64 generator
(counter-based, 128-bit key). The key packs the user seed in the low 64
bits and a stream id in the high 64 bits, so independent streams such as
Monte-Carlo shards never overlap and do not depend on how work is split
across workers.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def generator(seed, stream=0):
    """Return a ``numpy.random.Generator`` for ``(seed, stream)``."""
    seed = int(seed)
    stream = int(stream)
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be nonnegative")
    key = ((stream & _MASK64) << 64) | (seed & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


# Stream ids reserved per consumer so that e.g. the noise draw and the
# sampler never share a stream when a caller reuses one seed for both.
STREAM_SURFACE = 1
STREAM_NOISE = 2
STREAM_VCM = 1 << 32
STREAM_PERTURB = 3
