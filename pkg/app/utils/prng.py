# app/utils/prng.py

"""
Counter-based random streams.

Every random quantity in the laboratory is a pure function of
``(master_seed, trial_index, stream, linear_index)``. The Philox bit generator is
keyed by ``master_seed | trial_index << 64``; a second stream under the same key
is obtained by jumping the counter by 2**128 draws. Because Philox is counter
based, any window of a stream can be regenerated without replaying its prefix,
which lets row blocks of a matrix be sampled independently of each other and of
other trials.
"""

import logging
from enum import IntEnum

import numpy as np

from app.core.exceptions import ParameterError

logger = logging.getLogger(__name__)

_U64 = 1 << 64
# One Philox counter step yields four 64-bit words.
_WORDS_PER_STEP = 4
_INV_2_53 = 2.0 ** -53


class Stream(IntEnum):
    MASK = 0
    VALUE = 1


def stream_key(master_seed: int, trial_index: int) -> int:
    """Pack a seed pair into the 128-bit Philox key.

    Raises:
        ParameterError: If either component does not fit in 64 unsigned bits.
    """
    if not 0 <= master_seed < _U64:
        raise ParameterError(f"master_seed must be an unsigned 64-bit integer, got {master_seed}")
    if not 0 <= trial_index < _U64:
        raise ParameterError(f"trial_index must be an unsigned 64-bit integer, got {trial_index}")
    return master_seed | (trial_index << 64)


class CounterStream:
    """Random access view over one Philox stream."""

    def __init__(self, master_seed: int, trial_index: int, stream: Stream) -> None:
        self.key = stream_key(master_seed, trial_index)
        self.stream = Stream(stream)

    def _bit_generator(self) -> np.random.Philox:
        bit_generator = np.random.Philox(key=self.key)
        if self.stream:
            bit_generator = bit_generator.jumped(int(self.stream))
        return bit_generator

    def raw(self, start: int, count: int) -> np.ndarray:
        """Return ``count`` raw 64-bit words beginning at word ``start``."""
        if start < 0 or count < 0:
            raise ParameterError("stream window must be non-negative")
        bit_generator = self._bit_generator()
        steps, skip = divmod(start, _WORDS_PER_STEP)
        if steps:
            bit_generator.advance(steps)
        words = bit_generator.random_raw(count + skip)
        return np.asarray(words, dtype=np.uint64)[skip:]

    def uniforms(self, start: int, count: int) -> np.ndarray:
        """Uniform doubles on the open interval (0, 1), one per 64-bit word."""
        words = self.raw(start, count)
        return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def trial_streams(master_seed: int, trial_index: int) -> tuple[CounterStream, CounterStream]:
    """The (mask, value) stream pair of one trial."""
    return (
        CounterStream(master_seed, trial_index, Stream.MASK),
        CounterStream(master_seed, trial_index, Stream.VALUE)
    )
