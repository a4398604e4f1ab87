"""
Sequential graph growth.

`grow` starts at the optimal edgeless matrix and, at each step, activates the best free edge
under a selection rule and then re-optimises over the enlarged support (an approximate full
correction warm-started at the current iterate). `grow_naive` orders edges by the magnitude of
the unconstrained precision S⁻¹ or of its partial correlations.
"""
import logging
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from seqgrowth.core.base.errors import ComputeError, GrowthAbortedError
from seqgrowth.core.descent.descent import DescentReport, StoppingConfig, descend
from seqgrowth.core.descent.selection import (
    SelectionKind,
    SelectionRule,
    fully_corrected,
    score_candidates,
)
from seqgrowth.core.growth.growth_trace import GrowthMethod, GrowthTrace
from seqgrowth.core.matrix.gaussian_loss import gaussian_loss, optimal_diagonal_init
from seqgrowth.core.matrix.sym_matrix import (
    Edge,
    MatrixLike,
    SpdPair,
    Support,
    as_array,
    partial_correlations,
    spd_inverse,
)
from seqgrowth.core.utils import SeedDomain, make_rng

logger = logging.getLogger(__name__)


def _check_k_max(k_max: int, d: int) -> None:
    max_edges = d * (d - 1) // 2
    if not 1 <= k_max <= max_edges:
        raise ValueError(f"k_max must be in [1, {max_edges}] for d={d}, but got {k_max}")


def _resolve_rule(rule: Union[SelectionRule, SelectionKind]) -> SelectionRule:
    if isinstance(rule, SelectionKind):
        rule = SelectionRule(rule)
    if rule.kind == SelectionKind.GS:
        raise ValueError("GS is an inner descent rule, not a growth rule")
    return rule


def _best_free_edge(
    kind: SelectionKind, s: np.ndarray, pair: SpdPair, free: List[Edge]
) -> Tuple[Edge, float]:
    rows = np.fromiter((e[0] for e in free), dtype=np.intp, count=len(free))
    cols = np.fromiter((e[1] for e in free), dtype=np.intp, count=len(free))
    scores = score_candidates(kind, s, pair, rows, cols)
    best = int(np.argmax(scores))
    return free[best], float(scores[best])


def _best_corrected_edge(
    s: np.ndarray,
    pair: SpdPair,
    support: Support,
    free: List[Edge],
    cfg: StoppingConfig,
    inner_rule: SelectionKind,
    loss: float,
    n_jobs: int,
) -> Tuple[Edge, float, SpdPair, DescentReport]:
    if n_jobs == 1:
        results = [fully_corrected(s, pair, e, cfg, inner_rule, support, loss) for e in free]
    else:
        results = Parallel(n_jobs=n_jobs)(
            delayed(fully_corrected)(s, pair, e, cfg, inner_rule, support, loss) for e in free
        )
    improvements = np.array([result[0] for result in results])
    # free edges are lexicographic, argmax keeps the first maximiser
    best = int(np.argmax(improvements))
    improvement, corrected, report = results[best]
    return free[best], improvement, corrected, report


def grow(
    s: MatrixLike,
    rule: Union[SelectionRule, SelectionKind],
    cfg: Optional[StoppingConfig] = None,
    k_max: Optional[int] = None,
    inner_rule: SelectionKind = SelectionKind.GSL,
    n_jobs: int = 1,
) -> GrowthTrace:
    """
    Grows a graph edge by edge from the edgeless graph.

    Args:
        s: The loss anchor S (ridge-regularised covariance).
        rule: GSL or BBI (dry scores on the current iterate) or BFCI (approximate fully-corrective
            improvement of every free edge).
        cfg: Stopping rule of every full correction, including BFCI's candidate corrections.
        k_max: Number of edges to activate; defaults to all d(d−1)/2 pairs.
        inner_rule: Selection rule of the descent used for full corrections.
        n_jobs: joblib workers for BFCI candidate corrections.

    Returns:
        GrowthTrace: One step per activated edge.

    Raises:
        DegenerateInputError: If some S_ii is not positive.
        GrowthAbortedError: If a correction fails; carries the partial trace.
    """
    selection = _resolve_rule(rule)
    cfg = selection.descent_cfg or cfg or StoppingConfig()
    s_arr = as_array(s, what="S")
    d = s_arr.shape[0]
    k_max = k_max if k_max is not None else d * (d - 1) // 2
    _check_k_max(k_max, d)

    pair = optimal_diagonal_init(s_arr)
    loss = gaussian_loss(s_arr, pair)
    trace = GrowthTrace(GrowthMethod(selection.kind.value), d, initial_loss=loss)
    support = Support(d)
    logger.info(
        "Growing %d edge(s) with %s at d=%d (tau=%g)", k_max, selection.kind.value, d, cfg.tau
    )

    for k in range(1, k_max + 1):
        free = support.free_edges()
        try:
            if selection.kind == SelectionKind.BFCI:
                edge, score, pair, report = _best_corrected_edge(
                    s_arr, pair, support, free, cfg, selection.inner_rule, loss, n_jobs
                )
                support = support.with_edge(edge)
            else:
                edge, score = _best_free_edge(selection.kind, s_arr, pair, free)
                support = support.with_edge(edge)
                report = descend(
                    s_arr, pair, support, rule=selection.inner_rule, cfg=cfg, initial_loss=loss
                )
        except ComputeError as e:
            logger.error("Growth aborted at step %d: %s", k, e)
            raise GrowthAbortedError(trace, e) from e
        loss = report.final_loss
        trace.append(edge, loss, report.iterations, score)
        logger.debug(
            "Step %d: activated %s (score %.6g), loss %.12g after %d inner iteration(s)",
            k,
            edge,
            score,
            loss,
            report.iterations,
        )
    return trace


def naive_scores(s: MatrixLike, method: GrowthMethod) -> Tuple[List[Edge], np.ndarray]:
    """
    Returns the upper pairs and their naive scores: |Ω_ij| (PREC) or |Ω_ij|/√(Ω_ii Ω_jj) (PCORR),
    with Ω = S⁻¹.

    Raises:
        NotPositiveDefiniteError: If S is singular.
    """
    omega = spd_inverse(s, what="S")
    d = omega.shape[0]
    rows, cols = np.triu_indices(d, k=1)
    if method == GrowthMethod.PREC:
        scores = np.abs(omega[rows, cols])
    elif method == GrowthMethod.PCORR:
        scores = np.abs(partial_correlations(omega)[rows, cols])
    else:
        raise ValueError(f"{method} is not a naive growth")
    return list(zip(rows.tolist(), cols.tolist())), scores


def grow_naive(
    s: MatrixLike,
    method: GrowthMethod,
    k_max: Optional[int] = None,
    seed: int = 0,
    tie_index: int = 0,
    with_losses: bool = False,
    cfg: Optional[StoppingConfig] = None,
    inner_rule: SelectionKind = SelectionKind.GSL,
) -> GrowthTrace:
    """
    Orders the edges by decreasing naive score; exact ties are broken by a seeded random key.
    `tie_index` selects an independent tie-break stream under the same seed.

    With `with_losses`, the loss of every prefix graph is obtained by warm-started descents
    along the ordering; otherwise the trace's losses are left empty.
    """
    s_arr = as_array(s, what="S")
    d = s_arr.shape[0]
    k_max = k_max if k_max is not None else d * (d - 1) // 2
    _check_k_max(k_max, d)
    edges, scores = naive_scores(s_arr, method)
    tie_key = make_rng(seed, SeedDomain.NAIVE_TIES, tie_index).random(len(edges))
    order = np.lexsort((tie_key, -scores))[:k_max]

    trace = GrowthTrace(method, d, seed=seed)
    if not with_losses:
        for position in order:
            trace.append(edges[position], None, 0, float(scores[position]))
        return trace

    cfg = cfg or StoppingConfig()
    pair = optimal_diagonal_init(s_arr)
    loss = gaussian_loss(s_arr, pair)
    trace.initial_loss = loss
    support = Support(d)
    for position in order:
        edge = edges[position]
        support = support.with_edge(edge)
        try:
            report = descend(s_arr, pair, support, rule=inner_rule, cfg=cfg, initial_loss=loss)
        except ComputeError as e:
            raise GrowthAbortedError(trace, e) from e
        loss = report.final_loss
        trace.append(edge, loss, report.iterations, float(scores[position]))
    return trace


def activation_ranks(trace: GrowthTrace) -> Dict[Edge, int]:
    """
    Maps every upper pair to the step that activated it. Pairs never activated get the censored
    rank ``k_max + 1``.
    """
    censored = trace.k_max + 1
    ranks = {edge: censored for edge in Support.upper_pairs(trace.d)}
    for step in trace.steps:
        ranks[step.edge] = step.k
    return ranks


def grow_by_method(
    s: MatrixLike,
    method: GrowthMethod,
    cfg: Optional[StoppingConfig] = None,
    k_max: Optional[int] = None,
    seed: int = 0,
    tie_index: int = 0,
    inner_rule: SelectionKind = SelectionKind.GSL,
    with_losses: bool = False,
    n_jobs: int = 1,
) -> GrowthTrace:
    """Runs `grow` or `grow_naive` for `method`; the returned trace records `seed`."""
    if method.is_naive:
        return grow_naive(
            s,
            method,
            k_max,
            seed=seed,
            tie_index=tie_index,
            with_losses=with_losses,
            cfg=cfg,
            inner_rule=inner_rule,
        )
    trace = grow(s, SelectionKind(method.value), cfg, k_max, inner_rule, n_jobs)
    trace.seed = seed
    return trace
