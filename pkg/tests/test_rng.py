import numpy as np
import pytest

from ontolab.exceptions import DomainError
from ontolab.rng import check_seed, make_generator, spawn_generators, split_counts


def test_seeds_are_unsigned_64_bit():
    assert check_seed(2**64 - 1) == 2**64 - 1
    with pytest.raises(DomainError):
        check_seed(-1)
    with pytest.raises(DomainError):
        check_seed(2**64)


def test_streams_are_reproducible():
    assert np.array_equal(make_generator(7).random(5), make_generator(7).random(5))
    first = [g.random(3) for g in spawn_generators(7, 3)]
    second = [g.random(3) for g in spawn_generators(7, 3)]
    assert all(np.array_equal(a, b) for a, b in zip(first, second))
    assert not np.array_equal(first[0], first[1])
    with pytest.raises(DomainError):
        spawn_generators(7, 0)


def test_split_counts():
    assert split_counts(10, 3) == [4, 3, 3]
    assert split_counts(2, 4) == [1, 1, 0, 0]
    assert sum(split_counts(100_001, 7)) == 100_001
