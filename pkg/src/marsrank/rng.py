"""Deterministic SplitMix64 streams.

Every random quantity in the toolkit comes from here so results are
reproducible bit-for-bit across runs, platforms and thread counts:

* permutation ``p`` (0-based) of a test seeded with ``seed`` draws from a
  SplitMix64 generator whose seed is the ``p + 1``-th output of
  ``SplitMix64(seed)``;
* uniform integers in ``[0, n)`` use rejection sampling: draw 64-bit ``x``
  until ``x >= 2**64 mod n``, then return ``x mod n``;
* uniform floats in (0, 1) are ``((x >> 11) + 0.5) / 2**53``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO64 = 1 << 64


def to_seed(seed: int) -> int:
    """Reduce any Python int to an unsigned 64-bit seed (two's complement)."""
    return int(seed) & MASK64


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def stream_seed(seed: int, index: int) -> int:
    """Seed of sub-stream ``index``: output ``index + 1`` of SplitMix64(seed)."""
    return mix64((to_seed(seed) + (index + 1) * GOLDEN_GAMMA) & MASK64)


class SplitMix64:
    """Scalar generator; used where draws are few (scenario noise)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = to_seed(seed)

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def uniform_int(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (_TWO64 - n) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n

    def uniform01(self) -> float:
        """Uniform double strictly inside (0, 1)."""
        return ((self.next_u64() >> 11) + 0.5) * (1.0 / (1 << 53))

    def shuffle(self, items: list) -> list:
        """In-place Fisher-Yates, descending index."""
        for i in range(len(items) - 1, 0, -1):
            j = self.uniform_int(i + 1)
            items[i], items[j] = items[j], items[i]
        return items


_U_GAMMA = np.uint64(GOLDEN_GAMMA)
_U_MIX1 = np.uint64(_MIX1)
_U_MIX2 = np.uint64(_MIX2)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _U_MIX1
    z = (z ^ (z >> _S27)) * _U_MIX2
    return z ^ (z >> _S31)


class SplitMix64Array:
    """Many independent SplitMix64 generators advanced in lock-step.

    Element ``i`` behaves exactly like ``SplitMix64(seeds[i])``; rejection
    sampling redraws only the lanes that were rejected, so each lane consumes
    its own stream exactly as the scalar generator would.
    """

    def __init__(self, seeds):
        self.state = np.asarray(seeds, dtype=np.uint64).copy()

    @classmethod
    def for_substreams(cls, seed: int, indices) -> "SplitMix64Array":
        idx = np.asarray(indices, dtype=np.uint64)
        with np.errstate(over="ignore"):
            base = np.uint64(to_seed(seed)) + (idx + np.uint64(1)) * _U_GAMMA
            return cls(_mix64_array(base))

    def _advance(self, lanes=None) -> np.ndarray:
        with np.errstate(over="ignore"):
            if lanes is None:
                self.state += _U_GAMMA
                return _mix64_array(self.state)
            self.state[lanes] += _U_GAMMA
            return _mix64_array(self.state[lanes])

    def uniform_int(self, n: int) -> np.ndarray:
        """One uniform integer in [0, n) per lane."""
        threshold = np.uint64((_TWO64 - n) % n)
        un = np.uint64(n)
        x = self._advance()
        bad = np.flatnonzero(x < threshold)
        while bad.size:
            x[bad] = self._advance(bad)
            bad = bad[x[bad] < threshold]
        return (x % un).astype(np.intp)
