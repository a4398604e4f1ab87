import numpy as np
import pytest

from seqgrowth.core.growth.growth_trace import GrowthMethod, GrowthTrace
from seqgrowth.core.matrix.sym_matrix import Support, SymMatrix
from seqgrowth.synthetic.scenario import GroundTruth


def toy_truth(d, edges):
    return GroundTruth(SymMatrix.identity(d), SymMatrix.identity(d), Support(d, tuple(edges)))


def toy_trace(d, edges, method=GrowthMethod.GSL):
    trace = GrowthTrace(method, d)
    for k, edge in enumerate(edges):
        trace.append(edge, 1.0 / (k + 1), 1, 0.0)
    return trace


@pytest.fixture
def make_truth():
    return toy_truth


@pytest.fixture
def make_trace():
    return toy_trace


@pytest.fixture
def truth4():
    """Four nodes, true edges (0, 1) and (2, 3)."""
    return toy_truth(4, [(0, 1), (2, 3)])


@pytest.fixture
def gaussian_data():
    rng = np.random.default_rng(12)
    covariance = np.array(
        [[1.0, 0.6, 0.0, 0.0], [0.6, 1.0, 0.3, 0.0], [0.0, 0.3, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
    )
    return rng.multivariate_normal(np.zeros(4), covariance, size=120)
