"""Portable seeded randomness.

Draws come only from the raw 64-bit output of the PCG64 permutation
generator (seeded through numpy's ``SeedSequence``), and every derived
quantity is computed here in integer arithmetic, so a seed yields the same
stream on every platform and numpy release.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

import numpy as np

T = TypeVar("T")

MASK64 = (1 << 64) - 1


class Rng:
    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._bits = np.random.PCG64(self.seed)

    def u64(self) -> int:
        return int(self._bits.random_raw())

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.u64()
            if x < limit:
                return x % n

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def chance(self, p: float) -> bool:
        return self.u64() < int(p * (1 << 64))

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def weighted_order(self, weights: Sequence[float]) -> list[int]:
        """Indices with positive weight, drawn without replacement by weight."""
        # Fixed-point weights keep the arithmetic exact.
        pool = [(i, int(w * 1_000_000)) for i, w in enumerate(weights)]
        pool = [(i, w) for i, w in pool if w > 0]
        order = []
        while pool:
            total = sum(w for _, w in pool)
            r = self.below(total)
            for j, (i, w) in enumerate(pool):
                if r < w:
                    order.append(i)
                    del pool[j]
                    break
                r -= w
        return order


def case_seed(seed: int, index: int) -> int:
    """Independent per-case seed (splitmix64 finaliser over seed + index)."""
    z = (seed + 0x9E3779B97F4A7C15 * (index + 1)) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)
