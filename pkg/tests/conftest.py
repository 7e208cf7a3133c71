import itertools

import numpy as np
import pytest

from hqea.core import BitString


def all_strings(n):
    for bits in itertools.product((0, 1), repeat=n):
        yield BitString.from_bits(bits)


@pytest.fixture
def rng():
    from hqea.core import RandomSource
    return RandomSource(12345)


@pytest.fixture
def np_rng():
    return np.random.default_rng(2024)
