"""SplitMix64: a tiny 64-bit generator with a bit-exact, platform-independent stream.

Constants are the published ones (Steele, Lea and Flood 2014; also the seeding
generator of xoshiro).
"""
from __future__ import annotations

MASK64 = 0xFFFF_FFFF_FFFF_FFFF
GOLDEN_GAMMA = 0x9E37_79B9_7F4A_7C15
MIX1 = 0xBF58_476D_1CE4_E5B9
MIX2 = 0x94D0_49BB_1331_11EB


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def rng_next(state: int):
    """Advance ``state`` and return ``(new_state, 64-bit output)``."""
    state = (state + GOLDEN_GAMMA) & MASK64
    return state, mix64(state)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state, out = rng_next(self.state)
        return out

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.random()

    def below(self, n: int) -> int:
        """Integer in ``[0, n)`` by rejection, free of modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def substream(self, tag: int) -> "SplitMix64":
        """Independent generator derived from the current state and ``tag``.

        Does not advance this generator, so sibling streams never shift each other.
        """
        return SplitMix64(mix64((self.state ^ mix64((tag * GOLDEN_GAMMA) & MASK64)) & MASK64))
