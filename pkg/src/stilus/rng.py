"""Deterministic 64-bit pseudo-random stream.

Seed-sensitive algorithms (k-means++ seeding, PCA start vectors) draw from
SplitMix64 rather than a platform RNG so that a given seed reproduces the
same run on every build. The update and output constants below are the
standard SplitMix64 ones; do not change them, or recorded runs stop
reproducing.
"""

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator over Python ints masked to 64 bits."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # top 53 bits -> uniform double in [0, 1)
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Integer in [0, n). Modulo bias is accepted and documented."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n
