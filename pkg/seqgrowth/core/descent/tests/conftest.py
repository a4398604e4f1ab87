from typing import List

import numpy as np
import pytest

from seqgrowth.core.matrix.sym_matrix import Edge, SpdPair, Support


def random_spd(d: int, seed: int, conditioning: float = 0.5) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d))
    return a @ a.T / d + conditioning * np.eye(d)


def random_pair(d: int, seed: int) -> SpdPair:
    """A dense SPD iterate, unrelated to any anchor."""
    return SpdPair.from_matrix(random_spd(d, seed + 10_000, conditioning=1.0))


def random_support(d: int, seed: int, density: float = 0.5) -> Support:
    rng = np.random.default_rng(seed)
    pairs: List[Edge] = Support.upper_pairs(d)
    keep = rng.random(len(pairs)) < density
    return Support(d, tuple(edge for edge, kept in zip(pairs, keep) if kept))


@pytest.fixture
def make_spd():
    return random_spd


@pytest.fixture
def make_pair():
    return random_pair


@pytest.fixture
def make_support():
    return random_support


@pytest.fixture
def s5():
    return random_spd(5, seed=3)
