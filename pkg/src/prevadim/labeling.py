"""Seeded 0/1 labelings of construction intervals and deterministic random streams.

A labeling is a 64-bit seed. The bit of interval I_{k,i} is the top bit of a
splitmix64 hash of the seed key against a path key, where the path key is a
hash chain over the base-b digits of i (so it is a pure function of (k, i)
for a given construction and never needs i as a machine integer). Two
sentinel labelings, all-zero and all-one, bypass the hash.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import DomainError
from .kernels.constants import SEED_SALT

SEED_BITS = 64


def make_rng(seed, *key):
    """Generator for stream ``key`` of ``seed``; same (seed, key) -> same stream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(key))))


def split(rng, partitions):
    """Child generators for a fixed partition count (deterministic in rng state)."""
    return rng.spawn(int(partitions))


@dataclass(frozen=True)
class Labeling:
    seed: int
    levels: object = None
    fill: Optional[int] = None  # 0 / 1 for the constant sentinel labelings

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & ((1 << SEED_BITS) - 1))
        if self.fill not in (None, 0, 1):
            raise DomainError(f"fill must be None, 0 or 1, got {self.fill!r}")

    @classmethod
    def zeros(cls, levels=None):
        return cls(0, levels, fill=0)

    @classmethod
    def ones(cls, levels=None):
        return cls(0, levels, fill=1)

    @property
    def seedkey(self):
        return np.uint64(kernels.seed_key(self.seed))

    @property
    def fill_code(self):
        return -1 if self.fill is None else self.fill

    def bit(self, k, i):
        return bit(self, k, i)


def path_key(levels, k, i):
    """Path key of interval I_{k,i}."""
    dig = np.asarray([levels.digits(k, i)], dtype=np.int64)
    return int(kernels.path_keys(dig)[0, -1])


def bit(labeling, k, i):
    """omega(I_{k,i}) in {0, 1}."""
    levels = labeling.levels
    if levels is None:
        raise DomainError("labeling is not attached to a construction")
    key = path_key(levels, k, i)  # validates k and i
    if labeling.fill is not None:
        return labeling.fill
    return int(kernels.mix64_int(key ^ kernels.seed_key(labeling.seed)) >> 63)


def bits_along(labeling, digits):
    """Bits omega(I_{k, i_k}) for k = 1..len(digits) along one digit path."""
    keys = kernels.path_keys(np.asarray([digits], dtype=np.int64))[0]
    if labeling.fill is not None:
        return np.full(keys.size, labeling.fill, dtype=np.uint8)
    return kernels.bit_matrix(keys, np.array([labeling.seedkey], dtype=np.uint64))[0]


def draw_seeds(rng, size):
    return rng.integers(0, 2 ** 64, size=size, dtype=np.uint64)


def sample_labeling(rng, levels=None):
    """Fresh labeling with a seed drawn from ``rng``."""
    return Labeling(int(draw_seeds(rng, 1)[0]), levels)


def seed_keys(seeds):
    return kernels.mix64(np.asarray(seeds, dtype=np.uint64).ravel() ^ np.uint64(SEED_SALT))
