"""Ising channel with unit-delay feedback.

The channel state is the previous input.  When the new input repeats the
state the output equals the input; otherwise the output is a fair coin.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterable

import numpy as np


class Bit(IntEnum):
    ZERO = 0
    ONE = 1

    def flip(self) -> "Bit":
        return Bit(1 - self)


def transition_prob(x: int, s_prev: int, y: int) -> float:
    """p(y | x, s_prev) for the Ising channel (values in {0, 0.5, 1})."""
    x, s_prev, y = Bit(x), Bit(s_prev), Bit(y)
    if x == s_prev:
        return 1.0 if y == x else 0.0
    return 0.5


def next_state(s_prev: int, x: int, y: int) -> Bit:
    """The unifilar state update: the new state is the input just sent."""
    for v in (s_prev, y):
        Bit(v)  # ValueError on anything but 0/1
    return Bit(x)


class NoiseSource:
    """Stream of fair coin flips.

    Backed by numpy's PCG64 bit generator, so a given seed always produces
    the same stream.  Flips are drawn in blocks for speed.  Use :meth:`spawn`
    to get statistically independent child streams for parallel runs.
    """

    _BLOCK = 4096

    def __init__(self, seed: int | np.random.SeedSequence | None = 0):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            self._seq = np.random.SeedSequence(seed)
        self._rng = np.random.Generator(np.random.PCG64(self._seq))
        self._buf = np.empty(0, dtype=np.int8)
        self._pos = 0
        self.flips = 0

    def flip(self) -> int:
        if self._pos >= len(self._buf):
            self._buf = self._rng.integers(0, 2, size=self._BLOCK, dtype=np.int8)
            self._pos = 0
        bit = int(self._buf[self._pos])
        self._pos += 1
        self.flips += 1
        return bit

    def spawn(self, n: int) -> list["NoiseSource"]:
        return [NoiseSource(s) for s in self._seq.spawn(n)]


class ForcedNoise(NoiseSource):
    """Replays a fixed coin sequence, e.g. ``ForcedNoise("11")``.

    Each flip is used directly as the channel output on an alternating send.
    Running past the end raises ``IndexError``.
    """

    def __init__(self, bits: str | Iterable[int]):
        if isinstance(bits, str):
            bits = [int(c) for c in bits.strip()]
        self.bits = [int(Bit(b)) for b in bits]
        self._pos = 0
        self.flips = 0

    def flip(self) -> int:
        if self._pos >= len(self.bits):
            raise IndexError(
                f"forced noise exhausted after {len(self.bits)} flips"
            )
        bit = self.bits[self._pos]
        self._pos += 1
        self.flips += 1
        return bit

    def spawn(self, n: int) -> list[NoiseSource]:
        raise TypeError("forced noise cannot be split")


def transmit(x: int, s_prev: int, noise: NoiseSource) -> tuple[Bit, Bit]:
    """Send one symbol; returns ``(y, s_new)``.

    The noise stream is only consumed when ``x != s_prev``.
    """
    x, s_prev = Bit(x), Bit(s_prev)
    if x == s_prev:
        return x, x
    return Bit(noise.flip()), x
