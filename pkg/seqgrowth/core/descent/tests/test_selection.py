import math

import numpy as np
import pytest

from seqgrowth.core.base.errors import DegenerateBlockError, EmptyCandidateSetError
from seqgrowth.core.descent.block_update import improvement_order1_dry, improvement_order2_dry
from seqgrowth.core.descent.descent import StoppingConfig
from seqgrowth.core.descent.selection import (
    SelectionKind,
    argmax_over,
    batch_scorer,
    fully_corrected,
    score_bbi,
    score_candidates,
    score_fci,
    score_gs,
    score_gsl,
)
from seqgrowth.core.matrix.gaussian_loss import (
    gaussian_loss,
    loss_hessian_form,
    optimal_diagonal_init,
)
from seqgrowth.core.matrix.sym_matrix import SpdPair, Support


def direction(d, i, j):
    b = np.zeros((d, d))
    if i == j:
        b[i, i] = 1.0
    else:
        b[i, j] = b[j, i] = 1.0 / math.sqrt(2.0)
    return b


def test_gs_is_directional_gradient_magnitude(s5, make_pair):
    pair = make_pair(5, seed=0)
    assert score_gs(s5, pair, (2, 2)) == pytest.approx(abs(s5[2, 2] - pair.r[2, 2]))
    assert score_gs(s5, pair, (1, 3)) == pytest.approx(
        math.sqrt(2.0) * abs(s5[1, 3] - pair.r[1, 3])
    )


@pytest.mark.parametrize("index", [(0, 0), (0, 1), (2, 4), (3, 3)])
def test_gsl_is_gradient_squared_over_curvature(s5, make_pair, index):
    pair = make_pair(5, seed=1)
    b = direction(5, *index)
    grad = float(np.sum((s5 - pair.r) * b))
    curvature = loss_hessian_form(pair, b, b)
    assert score_gsl(s5, pair, index) == pytest.approx(grad * grad / curvature, rel=1e-10)


def test_gsl_curvature_matches_second_difference(s5, make_pair):
    pair = make_pair(5, seed=5)
    b = direction(5, 1, 4)
    h = 1e-4
    values = [gaussian_loss(s5, SpdPair.from_matrix(pair.q + t * b)) for t in (-h, 0.0, h)]
    numeric = (values[0] - 2 * values[1] + values[2]) / (h * h)
    assert loss_hessian_form(pair, b, b) == pytest.approx(numeric, rel=1e-4)


def test_bbi_is_block_improvement(s5, make_pair):
    pair = make_pair(5, seed=2)
    assert score_bbi(s5, pair, (0, 3)) == pytest.approx(improvement_order2_dry(s5, pair, (0, 3)))
    assert score_bbi(s5, pair, (4, 4)) == pytest.approx(improvement_order1_dry(s5, pair, 4))


@pytest.mark.parametrize("kind", [SelectionKind.GS, SelectionKind.GSL, SelectionKind.BBI])
def test_batch_scores_match_single_scores(s5, make_pair, kind):
    pair = make_pair(5, seed=3)
    rows, cols = Support(5, ((0, 1), (1, 4), (2, 3))).candidate_arrays()
    single = {
        SelectionKind.GS: score_gs,
        SelectionKind.GSL: score_gsl,
        SelectionKind.BBI: score_bbi,
    }
    batch = score_candidates(kind, s5, pair, rows, cols)
    expected = [single[kind](s5, pair, (int(i), int(j))) for i, j in zip(rows, cols)]
    np.testing.assert_allclose(batch, expected, rtol=1e-12)


def test_bfci_cannot_be_batched(s5, make_pair):
    with pytest.raises(ValueError):
        score_candidates(SelectionKind.BFCI, s5, make_pair(5, seed=0), [0], [1])


def test_argmax_breaks_ties_lexicographically():
    candidates = [(2, 3), (0, 4), (1, 2), (0, 2)]
    best = argmax_over(candidates, lambda rows, cols: np.ones(len(rows)), SelectionKind.GS)
    assert best.index_pair == (0, 2)
    assert best.score == 1.0
    assert best.rule == SelectionKind.GS


def test_argmax_picks_highest_score(s5):
    pair = optimal_diagonal_init(s5)
    candidates = Support.upper_pairs(5)
    best = argmax_over(candidates, batch_scorer(SelectionKind.GS, s5, pair), SelectionKind.GS)
    magnitudes = {edge: abs(s5[edge]) for edge in candidates}
    assert best.index_pair == max(magnitudes, key=magnitudes.get)


def test_argmax_rejects_empty_candidates():
    with pytest.raises(EmptyCandidateSetError):
        argmax_over([], lambda rows, cols: np.zeros(0), SelectionKind.GSL)


def test_argmax_rejects_non_finite_scores():
    with pytest.raises(DegenerateBlockError):
        argmax_over([(0, 1)], lambda rows, cols: np.array([np.nan]), SelectionKind.GSL)


def test_fully_corrected_leaves_input_untouched(s5):
    pair = optimal_diagonal_init(s5)
    q, r = pair.q.copy(), pair.r.copy()
    cfg = StoppingConfig(tau=1e-10, alpha=50, beta=50)

    improvement, clone, report = fully_corrected(s5, pair, (1, 2), cfg)

    assert np.array_equal(pair.q, q) and np.array_equal(pair.r, r)
    assert improvement == pytest.approx(gaussian_loss(s5, pair) - gaussian_loss(s5, clone))
    assert improvement >= score_bbi(s5, pair, (1, 2)) - 1e-12
    assert clone.edge_set().edges == ((1, 2),)
    assert report.iterations >= 1
    assert score_fci(s5, pair, (1, 2), cfg) == pytest.approx(improvement)


def test_fully_corrected_rejects_active_edge(s5):
    pair = optimal_diagonal_init(s5)
    with pytest.raises(ValueError):
        fully_corrected(s5, pair, (0, 1), support=Support(5, ((0, 1),)))


def test_gsl_hand_example():
    s = np.array([[1.0, 0.3], [0.3, 1.0]])
    assert score_gsl(s, SpdPair.from_matrix(np.eye(2)), (0, 1)) == pytest.approx(0.18)


def test_bbi_hand_example():
    # eigenvalues of S_II R_II⁻¹ are (2, 0.5): 2.5 − 2 − log 1
    s = np.diag([2.0, 0.5])
    assert score_bbi(s, SpdPair.from_matrix(np.eye(2)), (0, 1)) == pytest.approx(0.5)
    assert score_bbi(np.eye(2), SpdPair.from_matrix(np.eye(2)), (0, 1)) == 0.0
