from __future__ import annotations

import numpy as np
import pytest

from fatkappa import rng


def test_same_seed_and_stream_repeat():
    a = rng.generator(42, 3).random(1000)
    b = rng.generator(42, 3).random(1000)
    assert a.tobytes() == b.tobytes()


def test_streams_and_seeds_differ():
    base = rng.generator(42, 0).random(1000)
    assert not np.array_equal(base, rng.generator(42, 1).random(1000))
    assert not np.array_equal(base, rng.generator(43, 0).random(1000))


def test_stream_is_a_jump_of_stream_zero():
    # Stream k is stream 0 advanced by k * STREAM_SPACING draws.
    bg = rng.bit_generator(5, 0)
    bg.advance(2 * rng.STREAM_SPACING)
    a = np.random.Generator(bg).random(10)
    b = rng.generator(5, 2).random(10)
    assert a.tobytes() == b.tobytes()


@pytest.mark.parametrize("seed,stream", [(-1, 0), (2**64, 0), (0, -1), (0, rng.MAX_STREAMS)])
def test_rejects_out_of_range(seed, stream):
    with pytest.raises(Exception):
        rng.bit_generator(seed, stream)
