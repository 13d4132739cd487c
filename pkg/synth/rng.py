"""
Seeded pseudo-random numbers for scene synthesis.

xorshift64* with one independent generator per lane, vectorized over numpy
uint64 arrays. Lane i of stream s starts from
splitmix64((seed + (s << 40) + i) mod 2**64), so a sequence depends only on
(seed, stream, lane count) and is reproducible in any language.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_U = np.uint64


def splitmix64(values: np.ndarray) -> np.ndarray:
    """splitmix64 finaliser applied elementwise to a uint64 array."""
    z = values.astype(np.uint64) + _U(0x9E3779B97F4A7C15)
    z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


class XorShift64Star:
    """Vector of xorshift64* generators advanced in lock-step."""

    MULTIPLIER = _U(0x2545F4914F6CDD1D)

    def __init__(self, seed: int, lanes: int = 1, stream: int = 0):
        base = (int(seed) + (int(stream) << 40)) & _MASK64
        seeds = np.full(lanes, base, dtype=np.uint64) + np.arange(lanes, dtype=np.uint64)
        state = splitmix64(seeds)
        # the all-zero state is a fixed point of xorshift
        state[state == 0] = _U(0x9E3779B97F4A7C15)
        self.state = state
        self.lanes = lanes

    def next_u64(self) -> np.ndarray:
        x = self.state
        x ^= x >> _U(12)
        x ^= x << _U(25)
        x ^= x >> _U(27)
        self.state = x
        return x * self.MULTIPLIER

    def uniform(self) -> np.ndarray:
        """One draw per lane in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> _U(11)).astype(np.float64) * (2.0 ** -53)

    def normal(self) -> np.ndarray:
        """One standard normal draw per lane (Box-Muller, cosine branch)."""
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def integers(self, low: int, high: int) -> np.ndarray:
        """Integers in [low, high], one per lane."""
        span = high - low + 1
        return low + np.floor(self.uniform() * span).astype(np.int64)

    def scalar_uniform(self) -> float:
        return float(self.uniform()[0])

    def scalar_integer(self, low: int, high: int) -> int:
        return int(self.integers(low, high)[0])
