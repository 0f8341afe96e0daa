"""Counter-based streams: random access, stream separation, key validation."""

import numpy as np
import pytest

from app.core.exceptions import ParameterError
from app.utils.prng import (
    CounterStream,
    Stream,
    stream_key,
    trial_streams
)


class TestRandomAccess:

    @pytest.mark.parametrize("start,count", [(0, 9), (1, 4), (3, 1), (4, 8), (5, 7), (17, 3)])
    def test_window_matches_prefix(self, start, count):
        stream = CounterStream(42, 3, Stream.VALUE)
        full = stream.raw(0, start + count)
        np.testing.assert_array_equal(stream.raw(start, count), full[start:])

    def test_repeatable(self):
        a = CounterStream(7, 0, Stream.MASK).uniforms(0, 100)
        b = CounterStream(7, 0, Stream.MASK).uniforms(0, 100)
        np.testing.assert_array_equal(a, b)

    def test_uniforms_in_open_interval(self):
        u = CounterStream(0, 0, Stream.VALUE).uniforms(0, 100000)
        assert np.all(u > 0.0) and np.all(u < 1.0)
        assert abs(float(np.mean(u)) - 0.5) < 0.01


class TestStreamSeparation:

    def test_mask_and_value_differ(self):
        mask, value = trial_streams(42, 0)
        assert not np.array_equal(mask.raw(0, 16), value.raw(0, 16))

    def test_trials_differ(self):
        a = CounterStream(42, 0, Stream.VALUE).raw(0, 16)
        b = CounterStream(42, 1, Stream.VALUE).raw(0, 16)
        assert not np.array_equal(a, b)

    def test_seeds_differ(self):
        a = CounterStream(1, 0, Stream.VALUE).raw(0, 16)
        b = CounterStream(2, 0, Stream.VALUE).raw(0, 16)
        assert not np.array_equal(a, b)


class TestKeys:

    def test_packing(self):
        assert stream_key(5, 0) == 5
        assert stream_key(0, 1) == 1 << 64
        assert stream_key((1 << 64) - 1, (1 << 64) - 1) == (1 << 128) - 1

    @pytest.mark.parametrize("seed,trial", [(-1, 0), (1 << 64, 0), (0, -1), (0, 1 << 64)])
    def test_out_of_range(self, seed, trial):
        with pytest.raises(ParameterError):
            stream_key(seed, trial)

    def test_negative_window(self):
        with pytest.raises(ParameterError):
            CounterStream(0, 0, Stream.MASK).raw(-1, 3)
