import numpy as np
import pytest

from admissible import enumerate_admissible
from words import Alphabet, Word


@pytest.fixture
def word():
    """word("31", 4) -> Word"""
    def make(text: str, n: int) -> Word:
        return Word.parse(text, Alphabet(n))
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture(scope="session")
def small_blocks():
    """Admissible blocks by (N, p_max), computed once per session"""
    cache = {}

    def blocks(n: int, p_max: int):
        if (n, p_max) not in cache:
            cache[(n, p_max)] = enumerate_admissible(Alphabet(n), p_max)
        return cache[(n, p_max)]
    return blocks
