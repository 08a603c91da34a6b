"""Deterministic 64-bit pseudo-random generator for instance generation.

Instances must be regenerable bit-for-bit from (seed, parameters) alone, by
any implementation in any language, so this module fixes the generator to
splitmix64 with its standard constants instead of relying on a runtime's
built-in RNG.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream: state += GAMMA per draw, output finalized by two
    xor-shift-multiply rounds. All arithmetic modulo 2**64."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform draw in [0, n) as next_u64() % n.

        The modulo bias is at most n / 2**64, irrelevant at our range sizes,
        and the scheme is trivially portable.
        """
        if n <= 0:
            raise ValueError("randrange() requires n >= 1")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, iterating from the last index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]
