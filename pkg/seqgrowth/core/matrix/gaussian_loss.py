"""The Gaussian graphical loss f_S(Q) = tr(SQ) − log det Q and its differentials."""
import numpy as np

from seqgrowth.core.base.errors import DegenerateInputError
from seqgrowth.core.matrix.sym_matrix import (
    MatrixLike,
    SpdPair,
    SymMatrix,
    as_array,
    check_consistency,
    cholesky_logdet,
)

__all__ = [
    "gaussian_loss",
    "loss_gradient",
    "loss_hessian_form",
    "kl_gap",
    "optimal_diagonal_init",
    "check_consistency",
]


def _trace_product(s: np.ndarray, q: np.ndarray) -> float:
    # tr(SQ) for symmetric S, Q
    return float(np.sum(s * q))


def gaussian_loss(s: MatrixLike, pair: SpdPair) -> float:
    """
    Returns f_S(Q) = tr(SQ) − log det Q.

    Raises:
        DimensionMismatchError: If S and Q differ in size.
        NotPositiveDefiniteError: If Q fails its Cholesky factorisation.
    """
    s_arr = as_array(s, pair.dim, what="S")
    return _trace_product(s_arr, pair.q) - cholesky_logdet(pair.q, what="Q")


def loss_gradient(s: MatrixLike, pair: SpdPair) -> SymMatrix:
    """Returns ∇f_S(Q) = S − R from the maintained inverse."""
    s_arr = as_array(s, pair.dim, what="S")
    return SymMatrix(s_arr - pair.r)


def loss_hessian_form(pair: SpdPair, h1: MatrixLike, h2: MatrixLike) -> float:
    """Returns the second differential D²f_S(Q)(H₁, H₂) = tr(R H₁ R H₂)."""
    a = as_array(h1, pair.dim, what="H1")
    b = as_array(h2, pair.dim, what="H2")
    return float(np.trace(pair.r @ a @ pair.r @ b))


def kl_gap(s: MatrixLike, pair: SpdPair) -> float:
    """
    Returns f_S(Q) − f_S(S⁻¹) = tr(SQ − I) − log det(SQ), twice the KL divergence.

    Raises:
        NotPositiveDefiniteError: If S is singular.
    """
    s_arr = as_array(s, pair.dim, what="S")
    logdet_s = cholesky_logdet(s_arr, what="S")
    logdet_q = cholesky_logdet(pair.q, what="Q")
    return _trace_product(s_arr, pair.q) - pair.dim - logdet_s - logdet_q


def optimal_diagonal_init(s: MatrixLike) -> SpdPair:
    """
    Returns the graph-optimal pair of the edgeless graph, q_ii = 1/S_ii and r_ii = S_ii.

    Raises:
        DegenerateInputError: If some S_ii is not strictly positive.
    """
    s_arr = as_array(s, what="S")
    diagonal = np.diag(s_arr).copy()
    bad = np.flatnonzero(~(diagonal > 0))
    if bad.size:
        raise DegenerateInputError(
            f"S has non-positive diagonal entries at {bad.tolist()[:5]}; "
            "the edgeless loss is undefined"
        )
    return SpdPair(np.diag(1.0 / diagonal), np.diag(diagonal), consistency_bound=None)
