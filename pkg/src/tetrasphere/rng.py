"""Deterministic per-instance random streams.

Every instance of every suite draws from its own generator, seeded by

    instance_seed = first 8 bytes (little endian) of
                    BLAKE2b(f"{seed}:{suite}:{index}", digest_size=8)

and expanded by numpy's PCG64.  The split depends only on the triple, so
instances can be reproduced individually, in any order, from any language
that has BLAKE2b.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["instance_seed", "instance_rng", "MAX_SEED"]

MAX_SEED = 2**64 - 1


def instance_seed(seed: int, suite: str, index: int) -> int:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    digest = hashlib.blake2b(f"{seed}:{suite}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def instance_rng(seed: int, suite: str, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(instance_seed(seed, suite, index)))
