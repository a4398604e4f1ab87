import logging
from typing import Union

import numpy as np
import scipy.linalg

from seqgrowth.core.base.errors import DegenerateInputError, NotPositiveDefiniteError
from seqgrowth.core.matrix.sym_matrix import MatrixLike, SymMatrix, as_array
from seqgrowth.core.utils import SeedDomain, make_rng
from seqgrowth.synthetic.scenario import GroundTruth

logger = logging.getLogger(__name__)

DEFAULT_RIDGE_RHO = 1.0e-6


def sample_gaussian(
    truth: Union[GroundTruth, MatrixLike], n: int, seed: int, index: int = 0
) -> np.ndarray:
    """
    Draws an (n × d) matrix with i.i.d. N(0, Σ) rows as Z·Lᵀ, L the Cholesky factor of Σ.

    `index` selects an independent stream for repetition `index` under the same seed.
    """
    if n < 1:
        raise ValueError(f"n must be positive, but got {n}")
    sigma = as_array(truth.sigma if isinstance(truth, GroundTruth) else truth, what="Sigma")
    try:
        factor = scipy.linalg.cholesky(sigma, lower=True)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError("Sigma", str(e)) from e
    rng = make_rng(seed, SeedDomain.SAMPLING, index)
    return rng.standard_normal((n, sigma.shape[0])) @ factor.T


def sample_covariance(data: np.ndarray) -> SymMatrix:
    """The biased estimate (1/n) Σ xₗxₗᵀ; the data are not centred."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.shape[0] < 1:
        raise ValueError("at least one sample is required")
    return SymMatrix(data.T @ data / data.shape[0])


def apply_ridge(sigma_hat: MatrixLike, rho: float = DEFAULT_RIDGE_RHO) -> SymMatrix:
    """
    Returns S = Σ̂ + γ²I with γ² = ρ · mean(diag(Σ̂)).

    Raises:
        DegenerateInputError: If the diagonal of Σ̂ has no positive mass.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, but got {rho}")
    array = as_array(sigma_hat, what="Sigma_hat")
    gamma_squared = rho * float(np.mean(np.diag(array)))
    if not gamma_squared > 0:
        raise DegenerateInputError("the covariance has an all-zero diagonal; no ridge can fix it")
    return SymMatrix(array + gamma_squared * np.eye(array.shape[0]))


def build_anchor(data: np.ndarray, rho: float = DEFAULT_RIDGE_RHO) -> SymMatrix:
    """The ridge-regularised sample covariance of `data`."""
    return apply_ridge(sample_covariance(data), rho)
