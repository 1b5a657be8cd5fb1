"""Seeded random source for reproducible search and simulation."""

from __future__ import annotations

from typing import Sequence, TypeVar

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

T = TypeVar("T")


def derive_seed(master_seed: int, *path: int) -> int:
    """
    Derive an independent 63-bit seed from a master seed and an index path.

    ``derive_seed(seed, episode, stream)`` is stable across runs, processes
    and platforms because it only depends on numpy's SeedSequence hashing.
    """
    sequence = SeedSequence(entropy=master_seed, spawn_key=tuple(path))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


class RandomSource:
    """
    Deterministic random stream (numpy PCG64 seeded through SeedSequence).

    Features:
    - Identical seed gives the identical draw sequence everywhere
    - ``derive(index)`` splits off independent child streams
    - ``clone()`` copies the exact generator state for replay checks
    """

    def __init__(self, seed: int = 0) -> None:
        """
        Initialize the stream.

        Args:
            seed: Non-negative integer seed
        """
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self._seed = seed
        self._generator = Generator(PCG64(SeedSequence(seed)))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def generator(self) -> Generator:
        return self._generator

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return float(self._generator.random())

    def random_array(self, size: int) -> np.ndarray:
        """``size`` independent uniforms in [0, 1)."""
        return self._generator.random(size)

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in [low, high)."""
        return int(self._generator.integers(low, high))

    def choice(self, items: Sequence[T]) -> T:
        """Uniformly chosen element of a non-empty sequence."""
        if not items:
            raise ValueError("cannot choose from an empty sequence")
        return items[self.integers(0, len(items))]

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        """k distinct elements, in draw order."""
        if k > len(items):
            raise ValueError(f"cannot sample {k} of {len(items)} items")
        indices = self._generator.choice(len(items), size=k, replace=False)
        return [items[int(i)] for i in indices]

    def derive(self, index: int) -> RandomSource:
        """Independent child stream number ``index``; does not advance this stream."""
        return RandomSource(derive_seed(self._seed, index))

    def clone(self) -> RandomSource:
        """A copy positioned at exactly the same point of the stream."""
        twin = RandomSource(self._seed)
        twin._generator.bit_generator.state = self._generator.bit_generator.state
        return twin

    def __repr__(self) -> str:
        return f"RandomSource(seed={self._seed})"

