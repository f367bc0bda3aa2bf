"""Portable seeded randomness.

SplitMix64 (Steele, Lea and Flood): a 64-bit counter advanced by the golden
gamma and scrambled by two xor-shift-multiply rounds.  Pure integer
arithmetic, so a seed gives the same stream on every platform.
"""
from __future__ import annotations

from typing import List, Tuple

from .pauli import HermitianMatrix2

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int = 42):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in ``[0, 1)`` from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def integers(self, lo: int, hi: int) -> int:
        """Integer in ``[lo, hi]`` inclusive."""
        span = hi - lo + 1
        return lo + self.next_u64() % span


def random_hermitian(rng: SplitMix64, lo: float = -3.0, hi: float = 3.0) -> HermitianMatrix2:
    """Hermitian matrix with ``a11, a22, Re a12, Im a12`` uniform on ``[lo, hi]``."""
    a11, a22, re, im = (rng.uniform(lo, hi) for _ in range(4))
    return HermitianMatrix2(a11, a22, complex(re, im))


def random_pairs(seed: int, count: int, lo: float = -3.0, hi: float = 3.0) -> List[Tuple[HermitianMatrix2, HermitianMatrix2]]:
    rng = SplitMix64(seed)
    return [(random_hermitian(rng, lo, hi), random_hermitian(rng, lo, hi)) for _ in range(count)]


def random_grids(rng: SplitMix64, count: int, max_size: int = 12, lo: float = -3.0,
                 hi: float = 3.0, min_size: int = 2) -> List[List[float]]:
    return [
        [rng.uniform(lo, hi) for _ in range(rng.integers(min_size, max_size))]
        for _ in range(count)
    ]
