"""
Exact {1,2}-updates of an SPD pair.

An update over the index block I replaces Q_II by Q_II + S_II⁻¹ − R_II⁻¹, which makes the gradient
vanish on I, and refreshes R in O(d²) through the block formula

    R̃ = R − R_{:,I} K R_{I,:},   K = R_II⁻¹ − R_II⁻¹ S_II R_II⁻¹,

so that R̃_II = S_II. The loss decreases by tr(M) − m − log det M with M = S_II R_II⁻¹.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from seqgrowth.core.base.errors import DegenerateBlockError
from seqgrowth.core.matrix.sym_matrix import Edge, MatrixLike, SpdPair, as_array

logger = logging.getLogger(__name__)

SINGULARITY_TOLERANCE = 1.0e-14


@dataclass
class BlockUpdateResult:
    improvement: float
    touched: Tuple[int, ...]
    new_q_block: np.ndarray


@dataclass
class LineSearchResult:
    """Exact minimisation of f_S along a single normalised coordinate direction B(i, j)."""

    step: float
    improvement: float
    index: Edge


def _scalar_improvement(s_ii: float, r_ii: float) -> float:
    # x − 1 − log x with x = s/r, accurate near x = 1
    y = s_ii / r_ii - 1.0
    return y - math.log1p(y)


def _block_entries(s: np.ndarray, r: np.ndarray, i: int, j: int):
    return (s[i, i], s[i, j], s[j, j]), (r[i, i], r[i, j], r[j, j])


def _block_det(a: float, b: float, c: float, edge: Edge, what: str) -> float:
    det = a * c - b * b
    scale = abs(a * c) + b * b
    if not (a > 0 and c > 0 and det > SINGULARITY_TOLERANCE * scale):
        raise DegenerateBlockError(edge, f"{what} block is singular or indefinite (det={det:.3e})")
    return det


def _order2_improvement(s_block, r_block, edge: Edge) -> float:
    sa, sb, sc = s_block
    a, b, c = r_block
    det_r = _block_det(a, b, c, edge, "R")
    det_s = _block_det(sa, sb, sc, edge, "S")
    # tr(S_II R_II⁻¹) − 2, and log det(S_II R_II⁻¹) = log1p((det S − det R)/det R)
    trace_minus_two = (sa * c + sc * a - 2.0 * sb * b - 2.0 * det_r) / det_r
    return trace_minus_two - math.log1p((det_s - det_r) / det_r)


def improvement_order1_dry(s: MatrixLike, pair: SpdPair, i: int) -> float:
    """Would-be improvement of an order-1 update at (i, i); does not mutate."""
    s_arr = as_array(s, pair.dim, what="S")
    s_ii, r_ii = s_arr[i, i], pair.r[i, i]
    if not (s_ii > 0 and r_ii > 0):
        raise DegenerateBlockError((i,), f"non-positive pivot (S_ii={s_ii}, R_ii={r_ii})")
    return _scalar_improvement(s_ii, r_ii)


def improvement_order2_dry(s: MatrixLike, pair: SpdPair, edge: Edge) -> float:
    """
    Would-be improvement of an order-2 update on `edge`; does not mutate.

    This is tr(S_II R_II⁻¹) − 2 − log det(S_II R_II⁻¹), a function of the four block entries only.
    """
    i, j = edge
    s_arr = as_array(s, pair.dim, what="S")
    s_block, r_block = _block_entries(s_arr, pair.r, i, j)
    if s_block == r_block:
        return 0.0
    return _order2_improvement(s_block, r_block, edge)


def update_order1(s: MatrixLike, pair: SpdPair, i: int) -> BlockUpdateResult:
    """
    Exactly minimises f_S over Q_ii, mutating `pair` in place.

    Raises:
        DegenerateBlockError: If S_ii or R_ii is not positive.
    """
    s_arr = as_array(s, pair.dim, what="S")
    s_ii, r_ii = float(s_arr[i, i]), float(pair.r[i, i])
    improvement = improvement_order1_dry(s_arr, pair, i)
    if s_ii == r_ii:
        return BlockUpdateResult(0.0, (i,), pair.q[i : i + 1, i : i + 1].copy())

    pair.q[i, i] += 1.0 / s_ii - 1.0 / r_ii
    column = pair.r[:, i].copy()
    pair.r -= ((r_ii - s_ii) / (r_ii * r_ii)) * np.outer(column, column)
    pair.r[i, i] = s_ii
    pair.record_update()
    return BlockUpdateResult(improvement, (i,), pair.q[i : i + 1, i : i + 1].copy())


def update_order2(s: MatrixLike, pair: SpdPair, edge: Edge) -> BlockUpdateResult:
    """
    Exactly minimises f_S over the 2×2 block {i, j}, mutating `pair` in place.

    Raises:
        DegenerateBlockError: If S_II or R_II is singular relative to its scale.
    """
    i, j = edge
    index = [i, j]
    s_arr = as_array(s, pair.dim, what="S")
    s_block, r_block = _block_entries(s_arr, pair.r, i, j)
    if s_block == r_block:
        return BlockUpdateResult(0.0, (i, j), pair.q[np.ix_(index, index)].copy())

    improvement = _order2_improvement(s_block, r_block, edge)
    sa, sb, sc = s_block
    a, b, c = r_block
    det_r = a * c - b * b
    det_s = sa * sc - sb * sb
    r_inv = np.array([[c, -b], [-b, a]]) / det_r
    s_sub = np.array([[sa, sb], [sb, sc]])
    s_inv = np.array([[sc, -sb], [-sb, sa]]) / det_s

    pair.q[np.ix_(index, index)] += s_inv - r_inv
    # keep Q exactly symmetric on the block
    pair.q[j, i] = pair.q[i, j]

    kernel = r_inv - r_inv @ s_sub @ r_inv
    kernel = 0.5 * (kernel + kernel.T)
    columns = pair.r[:, index].copy()
    correction = columns @ kernel @ columns.T
    pair.r -= 0.5 * (correction + correction.T)
    pair.r[np.ix_(index, index)] = s_sub
    pair.record_update()
    return BlockUpdateResult(improvement, (i, j), pair.q[np.ix_(index, index)].copy())


def apply_update(s: MatrixLike, pair: SpdPair, index: Edge) -> BlockUpdateResult:
    """Dispatches (i, i) to an order-1 and (i, j), i < j, to an order-2 update."""
    i, j = index
    if i == j:
        return update_order1(s, pair, i)
    return update_order2(s, pair, (i, j) if i < j else (j, i))


def exact_line_search(s: MatrixLike, pair: SpdPair, index: Edge) -> LineSearchResult:
    """
    Exact line search from Q along B(i, j), without mutating the pair.

    B(i, i) = e_i e_iᵀ and B(i, j) = (e_i e_jᵀ + e_j e_iᵀ)/√2. Along the off-diagonal direction,
    with t = α/√2, det(Q + αB)/det Q = 1 + 2bt + (b² − ac)t² for R_II = [[a, b], [b, c]], and the
    optimal t solves s·e·t² + (2sb − e)t + (s − b) = 0 with e = b² − ac, s = S_ij.
    """
    i, j = index
    s_arr = as_array(s, pair.dim, what="S")
    if i == j:
        s_ii, r_ii = float(s_arr[i, i]), float(pair.r[i, i])
        improvement = improvement_order1_dry(s_arr, pair, i)
        return LineSearchResult(1.0 / s_ii - 1.0 / r_ii, improvement, (i, i))

    s_ij = float(s_arr[i, j])
    a, b, c = float(pair.r[i, i]), float(pair.r[i, j]), float(pair.r[j, j])
    e = b * b - a * c
    if not e < 0:
        raise DegenerateBlockError((i, j), f"R block is not positive-definite (e={e:.3e})")

    def g(t: float) -> float:
        return 1.0 + 2.0 * b * t + e * t * t

    if s_ij == 0.0:
        t_star = -b / e
    else:
        qa, qb, qc = s_ij * e, 2.0 * s_ij * b - e, s_ij - b
        root = math.sqrt(e * e + 4.0 * s_ij * s_ij * a * c)
        half = -0.5 * (qb + math.copysign(root, qb))
        candidates = [half / qa, qc / half]
        t_star = max(candidates, key=g)
    value = g(t_star)
    if not value > 0:
        raise DegenerateBlockError((i, j), "line search left the positive-definite cone")
    return LineSearchResult(math.sqrt(2.0) * t_star, math.log(value) - 2.0 * s_ij * t_star, (i, j))
