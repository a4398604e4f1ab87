import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable, List, Optional, Sequence, Tuple

import numpy as np

from seqgrowth.core.base.errors import DegenerateBlockError, EmptyCandidateSetError
from seqgrowth.core.descent.block_update import SINGULARITY_TOLERANCE
from seqgrowth.core.matrix.sym_matrix import Edge, MatrixLike, SpdPair, Support, as_array

if TYPE_CHECKING:
    from seqgrowth.core.descent.descent import DescentReport, StoppingConfig

logger = logging.getLogger(__name__)

Scorer = Callable[[np.ndarray, np.ndarray], np.ndarray]


class SelectionKind(Enum):
    """
    SelectionKind: Enum of edge and coordinate selection rules.
    GS, GSL and BBI also serve as inner rules of the support-restricted descent.
    """

    GS = "gs"
    GSL = "gsl"
    BBI = "bbi"
    BFCI = "bfci"


INNER_KINDS = (SelectionKind.GS, SelectionKind.GSL, SelectionKind.BBI)


@dataclass(frozen=True)
class SelectionRule:
    """
    A selection rule. For BFCI, `descent_cfg` and `inner_rule` configure the approximate full
    correction run for every candidate edge.
    """

    kind: SelectionKind
    descent_cfg: Optional["StoppingConfig"] = None
    inner_rule: SelectionKind = SelectionKind.GSL


@dataclass(frozen=True)
class ScoredCandidate:
    index_pair: Edge
    score: float
    rule: SelectionKind


def _order2_improvements(s: np.ndarray, r: np.ndarray, rows: np.ndarray, cols: np.ndarray):
    sa, sb, sc = s[rows, rows], s[rows, cols], s[cols, cols]
    a, b, c = r[rows, rows], r[rows, cols], r[cols, cols]
    det_r = a * c - b * b
    det_s = sa * sc - sb * sb
    valid = (
        (a > 0)
        & (c > 0)
        & (det_r > SINGULARITY_TOLERANCE * (np.abs(a * c) + b * b))
        & (sa > 0)
        & (sc > 0)
        & (det_s > SINGULARITY_TOLERANCE * (np.abs(sa * sc) + sb * sb))
    )
    if not np.all(valid):
        k = int(np.flatnonzero(~valid)[0])
        raise DegenerateBlockError(
            (int(rows[k]), int(cols[k])), "singular or indefinite 2x2 block while scoring"
        )
    trace_minus_two = (sa * c + sc * a - 2.0 * sb * b - 2.0 * det_r) / det_r
    scores = trace_minus_two - np.log1p((det_s - det_r) / det_r)
    unchanged = (sa == a) & (sb == b) & (sc == c)
    return np.where(unchanged, 0.0, scores)


def _order1_improvements(s_diag: np.ndarray, r_diag: np.ndarray) -> np.ndarray:
    if not (np.all(s_diag > 0) and np.all(r_diag > 0)):
        raise DegenerateBlockError((), "non-positive diagonal pivot while scoring")
    y = s_diag / r_diag - 1.0
    return y - np.log1p(y)


def score_candidates(
    kind: SelectionKind, s: MatrixLike, pair: SpdPair, rows: np.ndarray, cols: np.ndarray
) -> np.ndarray:
    """
    Scores the candidates (rows[k], cols[k]) with an inner rule in one vectorised pass.

    Diagonal candidates (i, i) are scored along B(i, i) = e_i e_iᵀ and off-diagonal ones along
    B(i, j) = (e_i e_jᵀ + e_j e_iᵀ)/√2:

    - GS: |⟨∇f, B⟩|, i.e. |S_ii − R_ii| or √2·|S_ij − R_ij|;
    - GSL: ⟨∇f, B⟩² / D²f(B, B), i.e. (S_ii − R_ii)²/R_ii² or
      2(S_ij − R_ij)²/(R_ii R_jj + R_ij²);
    - BBI: the improvement of the corresponding {1,2}-update.

    BFCI is not vectorisable, see `score_fci`.
    """
    s_arr = as_array(s, pair.dim, what="S")
    r = pair.r
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    diagonal = rows == cols
    scores = np.empty(rows.shape[0], dtype=float)
    grad = s_arr[rows, cols] - r[rows, cols]

    if kind == SelectionKind.GS:
        scores[:] = np.abs(grad)
        scores[~diagonal] *= math.sqrt(2.0)
    elif kind == SelectionKind.GSL:
        d_rows, d_cols = rows[diagonal], cols[diagonal]
        o_rows, o_cols = rows[~diagonal], cols[~diagonal]
        curvature_diag = r[d_rows, d_cols] ** 2
        curvature_off = r[o_rows, o_rows] * r[o_cols, o_cols] + r[o_rows, o_cols] ** 2
        if np.any(curvature_diag <= 0) or np.any(curvature_off <= 0):
            raise DegenerateBlockError((), "non-positive curvature, the pair is inconsistent")
        scores[diagonal] = grad[diagonal] ** 2 / curvature_diag
        scores[~diagonal] = 2.0 * grad[~diagonal] ** 2 / curvature_off
    elif kind == SelectionKind.BBI:
        d_rows = rows[diagonal]
        scores[diagonal] = _order1_improvements(s_arr[d_rows, d_rows], r[d_rows, d_rows])
        scores[~diagonal] = _order2_improvements(s_arr, r, rows[~diagonal], cols[~diagonal])
    else:
        raise ValueError(f"{kind} cannot be evaluated as a batch score")
    return scores


def score_gs(s: MatrixLike, pair: SpdPair, idx: Edge) -> float:
    return float(
        score_candidates(SelectionKind.GS, s, pair, np.array([idx[0]]), np.array([idx[1]]))[0]
    )


def score_gsl(s: MatrixLike, pair: SpdPair, edge: Edge) -> float:
    return float(
        score_candidates(SelectionKind.GSL, s, pair, np.array([edge[0]]), np.array([edge[1]]))[0]
    )


def score_bbi(s: MatrixLike, pair: SpdPair, edge: Edge) -> float:
    return float(
        score_candidates(SelectionKind.BBI, s, pair, np.array([edge[0]]), np.array([edge[1]]))[0]
    )


def fully_corrected(
    s: MatrixLike,
    pair: SpdPair,
    edge: Edge,
    descent_cfg: Optional["StoppingConfig"] = None,
    inner_rule: SelectionKind = SelectionKind.GSL,
    support: Optional[Support] = None,
    initial_loss: Optional[float] = None,
) -> Tuple[float, SpdPair, "DescentReport"]:
    """
    Activates `edge` on a clone of `pair` and runs the support-restricted descent on the enlarged
    support, warm-started at the current iterate.

    Returns:
        (improvement, corrected clone, descent report). The input pair is never mutated.
    """
    from seqgrowth.core.descent.descent import StoppingConfig, descend

    base = support if support is not None else pair.edge_set()
    if edge in base:
        raise ValueError(f"edge {edge} is already active")
    clone = pair.copy()
    report = descend(
        s,
        clone,
        base.with_edge(edge),
        rule=inner_rule,
        cfg=descent_cfg or StoppingConfig(),
        initial_loss=initial_loss,
    )
    return report.total_improvement, clone, report


def score_fci(
    s: MatrixLike,
    pair: SpdPair,
    edge: Edge,
    descent_cfg: Optional["StoppingConfig"] = None,
    inner_rule: SelectionKind = SelectionKind.GSL,
    support: Optional[Support] = None,
) -> float:
    """The (approximate) fully-corrective improvement score of a free edge."""
    improvement, _, _ = fully_corrected(s, pair, edge, descent_cfg, inner_rule, support)
    return improvement


def argmax_over(
    candidates: Sequence[Edge], scorer: Scorer, kind: SelectionKind
) -> ScoredCandidate:
    """
    Returns the best-scoring candidate. Ties go to the lexicographically smallest (i, j).

    Raises:
        EmptyCandidateSetError: If `candidates` is empty.
    """
    if len(candidates) == 0:
        raise EmptyCandidateSetError()
    ordered: List[Edge] = sorted((int(i), int(j)) for i, j in candidates)
    rows = np.array([c[0] for c in ordered], dtype=np.intp)
    cols = np.array([c[1] for c in ordered], dtype=np.intp)
    scores = np.asarray(scorer(rows, cols), dtype=float)
    if not np.all(np.isfinite(scores)):
        bad = int(np.flatnonzero(~np.isfinite(scores))[0])
        raise DegenerateBlockError(ordered[bad], "non-finite score")
    best = int(np.argmax(scores))
    return ScoredCandidate(ordered[best], float(scores[best]), kind)


def batch_scorer(kind: SelectionKind, s: MatrixLike, pair: SpdPair) -> Scorer:
    """Binds an inner rule to (S, pair) for use with `argmax_over`."""
    s_arr = as_array(s, pair.dim, what="S")
    return lambda rows, cols: score_candidates(kind, s_arr, pair, rows, cols)
