"""
Seeded random streams.

All randomness in ontolab is drawn from numpy Generators built here from a single
64-bit seed. Parallel workers receive spawned child streams, so a result depends
only on (seed, number of samples, number of workers).
"""

from typing import List

import numpy as np

from .exceptions import DomainError

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    "Validate a 64-bit unsigned seed and return it as int"
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def make_generator(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed)))


def spawn_generators(seed: int, n_streams: int) -> List[np.random.Generator]:
    "Independent child streams of the stream seeded with seed, one per worker"
    if n_streams < 1:
        raise DomainError(f"need at least one stream, got {n_streams}")
    children = np.random.SeedSequence(check_seed(seed)).spawn(n_streams)
    return [np.random.default_rng(child) for child in children]


def split_counts(total: int, parts: int) -> List[int]:
    "Split total into parts near-equal non-negative counts, larger ones first"
    base, extra = divmod(int(total), int(parts))
    return [base + 1 if i < extra else base for i in range(parts)]
