"""
Support-restricted coordinate descent with {1,2}-updates.

Each iteration picks the best index of D ∪ E under an inner rule, applies the exact update and
stops once the current improvement falls to a fraction τ of the first one, or when the iteration
cap min(hard_cap, ⌈α·|E| + β⌉) is reached.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, validator

from seqgrowth.core.descent.block_update import (
    apply_update,
    improvement_order1_dry,
    improvement_order2_dry,
)
from seqgrowth.core.descent.selection import INNER_KINDS, SelectionKind, score_candidates
from seqgrowth.core.matrix.gaussian_loss import gaussian_loss
from seqgrowth.core.matrix.sym_matrix import Edge, MatrixLike, SpdPair, Support, as_array

logger = logging.getLogger(__name__)

STATIONARY_FLOOR = 1.0e-15


class StoppingConfig(BaseModel):
    alpha: float = 1.0
    beta: float = 10.0
    tau: float = 1.0e-5
    hard_cap: int = 1_000_000

    class Config:
        extra = "forbid"

    @validator("alpha", "beta")
    def _non_negative(cls, value, field):
        if not value >= 0:
            raise ValueError(f"{field.name} must be non-negative, but got {value}")
        return value

    @validator("tau")
    def _tau_in_unit_interval(cls, value):
        if not 0 < value <= 1:
            raise ValueError(f"tau must be in (0,1], but got {value}")
        return value

    @validator("hard_cap")
    def _positive_cap(cls, value):
        if value < 1:
            raise ValueError(f"hard_cap must be positive, but got {value}")
        return value

    def max_iterations(self, edge_count: int) -> int:
        """min(hard_cap, ⌈α·m + β⌉), and at least one iteration."""
        return max(1, min(self.hard_cap, math.ceil(self.alpha * edge_count + self.beta)))


class StopReason(Enum):
    FRACTION = "fraction"
    ITER_CAP = "iter_cap"
    STATIONARY = "stationary"


@dataclass
class DescentReport:
    iterations: int
    initial_improvement: float
    final_improvement: float
    stop_reason: StopReason
    initial_loss: float
    final_loss: float
    total_improvement: float
    loss_trajectory: Optional[List[float]] = None
    improvements: Optional[List[float]] = None
    selections: Optional[List[Edge]] = None
    iterates: Optional[List[np.ndarray]] = field(default=None, repr=False)


def _dry_improvement(s: np.ndarray, pair: SpdPair, index: Edge) -> float:
    i, j = index
    return improvement_order1_dry(s, pair, i) if i == j else improvement_order2_dry(s, pair, index)


def descend(
    s: MatrixLike,
    pair: SpdPair,
    support: Support,
    rule: SelectionKind = SelectionKind.GSL,
    cfg: Optional[StoppingConfig] = None,
    record_trajectory: bool = False,
    record_iterates: bool = False,
    initial_loss: Optional[float] = None,
) -> DescentReport:
    """
    Runs the support-restricted descent on `pair` in place.

    Args:
        s: The loss anchor S.
        pair: The iterate; every edge of Q must belong to `support`.
        support: The edge set E; the diagonal is always active.
        rule: Inner selection rule, one of GS, GSL, BBI.
        cfg: Stopping configuration; defaults to α=1, β=10, τ=1e-5.
        record_trajectory: Keep losses, improvements and selections per iteration.
        record_iterates: Keep a copy of Q after every iteration (for eigenvalue diagnostics).
        initial_loss: f_S(Q) when the caller already tracks it.

    Returns:
        DescentReport: Losses are tracked by subtracting the exact improvements.

    Raises:
        InconsistentSupportError: If Q has edges outside `support`.
    """
    if rule not in INNER_KINDS:
        raise ValueError(f"{rule} is not an inner descent rule")
    cfg = cfg or StoppingConfig()
    s_arr = as_array(s, pair.dim, what="S")
    pair.check_support(support)

    rows, cols = support.candidate_arrays()
    max_iterations = cfg.max_iterations(len(support))
    loss = gaussian_loss(s_arr, pair) if initial_loss is None else float(initial_loss)
    start_loss = loss

    trajectory = [loss] if record_trajectory else None
    improvements: Optional[List[float]] = [] if record_trajectory else None
    selections: Optional[List[Edge]] = [] if record_trajectory else None
    iterates = [pair.q.copy()] if record_iterates else None

    iterations = 0
    initial_improvement = 0.0
    improvement = 0.0
    stop_reason = StopReason.ITER_CAP
    while iterations < max_iterations:
        scores = score_candidates(rule, s_arr, pair, rows, cols)
        k = int(np.argmax(scores))
        index = (int(rows[k]), int(cols[k]))
        if iterations == 0:
            dry = _dry_improvement(s_arr, pair, index)
            if dry <= STATIONARY_FLOOR * (1.0 + abs(loss)):
                stop_reason = StopReason.STATIONARY
                initial_improvement = improvement = dry
                break

        improvement = apply_update(s_arr, pair, index).improvement
        iterations += 1
        loss -= improvement
        if record_trajectory:
            trajectory.append(loss)
            improvements.append(improvement)
            selections.append(index)
        if record_iterates:
            iterates.append(pair.q.copy())

        if iterations == 1:
            initial_improvement = improvement
        elif improvement <= cfg.tau * initial_improvement:
            stop_reason = StopReason.FRACTION
            break

    logger.debug(
        "Descent on %d edge(s) stopped (%s) after %d iteration(s), loss %.12g",
        len(support),
        stop_reason.value,
        iterations,
        loss,
    )
    return DescentReport(
        iterations=iterations,
        initial_improvement=initial_improvement,
        final_improvement=improvement,
        stop_reason=stop_reason,
        initial_loss=start_loss,
        final_loss=loss,
        total_improvement=start_loss - loss,
        loss_trajectory=trajectory,
        improvements=improvements,
        selections=selections,
        iterates=iterates,
    )


def track_eigen_bounds(iterates: Sequence[np.ndarray]) -> Tuple[float, float]:
    """Returns (min λ_min, max λ_max) over the given symmetric matrices."""
    if len(iterates) == 0:
        raise ValueError("no iterates to bound")
    lowest, highest = math.inf, -math.inf
    for q in iterates:
        eigenvalues = scipy.linalg.eigvalsh(q)
        lowest = min(lowest, float(eigenvalues[0]))
        highest = max(highest, float(eigenvalues[-1]))
    return lowest, highest


def verify_rate_bound(
    s: MatrixLike,
    trajectory: Optional[Sequence[float]],
    support: Support,
    eigen_bounds: Tuple[float, float],
    optimal_loss: float,
    slack: float = 1.0e-9,
) -> bool:
    """
    Checks a GS descent trajectory against the linear convergence bound

        f(Q_t) − f* ≤ (1 − μ/(mL))^t (f(Q_0) − f*),

    with μ = 1/λ_max², L = 1/λ_min², m = |D ∪ E|, and against the per-step inequality
    f(Q_{t−1}) − f* ≤ (mL/μ)(f(Q_{t−1}) − f(Q_t)). The λ bounds are those observed over the
    iterates, so this is a necessary-condition check.
    """
    if not trajectory:
        raise ValueError("a recorded loss trajectory is required")
    lambda_min, lambda_max = eigen_bounds
    if not 0 < lambda_min <= lambda_max:
        raise ValueError(f"invalid eigenvalue bounds {eigen_bounds}")
    as_array(s, support.dim, what="S")
    m = support.dim + len(support)
    mu, lipschitz = 1.0 / lambda_max**2, 1.0 / lambda_min**2
    rate = 1.0 - mu / (m * lipschitz)
    condition = m * lipschitz / mu

    losses = np.asarray(trajectory, dtype=float)
    gaps = losses - optimal_loss
    for t in range(1, len(losses)):
        if gaps[t] > rate**t * gaps[0] + slack:
            logger.debug("Rate bound violated at t=%d: %.3e > %.3e", t, gaps[t], rate**t * gaps[0])
            return False
        if gaps[t - 1] > condition * (losses[t - 1] - losses[t]) + slack:
            logger.debug("Per-step gap bound violated at t=%d", t)
            return False
    return True
