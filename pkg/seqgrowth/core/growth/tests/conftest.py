import numpy as np
import pytest


def random_spd(d: int, seed: int, conditioning: float = 0.5) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d))
    return a @ a.T / d + conditioning * np.eye(d)


@pytest.fixture
def make_spd():
    return random_spd


@pytest.fixture
def s6():
    return random_spd(6, seed=21)
