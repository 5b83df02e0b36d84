"""Reproducible, provably disjoint random streams.

A ``(seed, stream)`` pair addresses one PCG64 substream.  The seed goes
through :class:`numpy.random.SeedSequence` to produce the base state and the
stream index advances that state by ``stream * STREAM_SPACING`` draws, so two
streams cannot overlap unless one of them consumes more than ``2**96``
64-bit outputs.
"""

from __future__ import annotations

import numpy as np

STREAM_SPACING = 1 << 96
MAX_STREAMS = 1 << 32


def bit_generator(seed: int, stream: int = 0) -> np.random.PCG64:
    if not 0 <= stream < MAX_STREAMS:
        raise ValueError(f"stream must be in [0, 2**32), got {stream}")
    if seed < 0 or seed >= 1 << 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    bg = np.random.PCG64(np.random.SeedSequence(seed))
    if stream:
        bg.advance(stream * STREAM_SPACING)
    return bg


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(bit_generator(seed, stream))
