import itertools

import pytest

from tolerantlearn.generators import random_multiclass, random_real, threshold_class


def small_mc_corpus(count: int, seed: int = 2024):
    """Random classes with <= 6 rows, <= 4 points, K <= 4."""
    sizes = list(itertools.product((2, 3, 4, 5, 6), (1, 2, 3, 4), (2, 3, 4)))
    corpus = []
    i = 0
    while len(corpus) < count:
        rows, points, K = sizes[i % len(sizes)]
        corpus.append(random_multiclass(rows, points, K, seed + i))
        i += 1
    return corpus


def small_real_corpus(count: int, seed: int = 4096, grid: float = 0.25):
    sizes = list(itertools.product((2, 3, 4), (1, 2, 3)))
    corpus = []
    i = 0
    while len(corpus) < count:
        rows, points = sizes[i % len(sizes)]
        corpus.append(random_real(rows, points, grid, seed + i))
        i += 1
    return corpus


@pytest.fixture(scope="session")
def mc_corpus():
    return small_mc_corpus(60)


@pytest.fixture(scope="session")
def real_corpus():
    return small_real_corpus(40)


@pytest.fixture(scope="session")
def threshold4():
    return threshold_class(4)
