"""
Stability analysis of activation ranks over random subsamples.

Every subsample (without replacement) yields a ridge-regularised anchor S and a growth; the
activation ranks of all edges are collected and summarised per edge. Edges are then ordered by
their median rank, and the k foremost form a consensus graph.
"""
import json
import logging
from dataclasses import dataclass
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence

import networkx as nx
import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from seqgrowth.core.base.errors import DegenerateInputError
from seqgrowth.core.descent.descent import StoppingConfig
from seqgrowth.core.descent.selection import SelectionKind
from seqgrowth.core.growth.growth import activation_ranks, grow_by_method
from seqgrowth.core.growth.growth_trace import SCHEMA_VERSION, GrowthMethod, GrowthTrace
from seqgrowth.core.matrix.sym_matrix import Edge, SymMatrix, Support
from seqgrowth.core.utils import SeedDomain, make_rng
from seqgrowth.synthetic.sampling import DEFAULT_RIDGE_RHO, build_anchor

logger = logging.getLogger(__name__)

AnchorBuilder = Callable[[np.ndarray], SymMatrix]


@dataclass
class RankDistribution:
    """
    Activation ranks of every upper pair over repetitions.

    Args:
        edges (List[Edge]): Upper pairs in lexicographic order.
        ranks (np.ndarray): (repetitions × pairs) ranks; never-activated pairs hold the censored
            rank ``k_max + 1``.
        k_max (int): Number of edges grown per repetition.
        skipped (int): Repetitions dropped because their subsample was degenerate.
    """

    edges: List[Edge]
    ranks: np.ndarray
    k_max: int
    skipped: int = 0

    @classmethod
    def from_traces(cls, traces: Sequence[GrowthTrace], skipped: int = 0) -> "RankDistribution":
        if not traces:
            raise ValueError("no traces given")
        d, k_max = traces[0].d, traces[0].k_max
        if any(trace.d != d or trace.k_max != k_max for trace in traces):
            raise ValueError("traces must share the dimension and the number of steps")
        edges = Support.upper_pairs(d)
        ranks = np.empty((len(traces), len(edges)), dtype=np.int64)
        for row, trace in enumerate(traces):
            by_edge = activation_ranks(trace)
            ranks[row] = [by_edge[edge] for edge in edges]
        return cls(edges, ranks, k_max, skipped)

    @property
    def repetitions(self) -> int:
        return self.ranks.shape[0]

    @property
    def dim(self) -> int:
        return self.edges[-1][1] + 1

    @property
    def censored_rank(self) -> int:
        return self.k_max + 1

    @property
    def per_edge(self) -> Dict[Edge, List[int]]:
        return {edge: self.ranks[:, k].tolist() for k, edge in enumerate(self.edges)}

    def summary(self) -> pd.DataFrame:
        """
        Per-edge median, quartiles, deciles and censored fraction, ordered by median rank (ties
        lexicographically). Percentiles use linear interpolation.
        """
        q10, q25, median, q75, q90 = np.percentile(
            self.ranks, [10, 25, 50, 75, 90], axis=0, method="linear"
        )
        frame = pd.DataFrame(
            {
                "i": [edge[0] for edge in self.edges],
                "j": [edge[1] for edge in self.edges],
                "median": median,
                "q25": q25,
                "q75": q75,
                "p10": q10,
                "p90": q90,
                "censored_fraction": np.mean(self.ranks == self.censored_rank, axis=0),
            }
        )
        return frame.sort_values(["median", "i", "j"], kind="mergesort").reset_index(drop=True)

    def consensus_edges(self, k: int) -> List[Edge]:
        """The k foremost edges by median activation rank."""
        ordered = self.summary()
        return [(int(i), int(j)) for i, j in zip(ordered["i"][:k], ordered["j"][:k])]

    def consensus_graph(self, k: int) -> nx.Graph:
        ordered = self.summary().head(k)
        graph = nx.Graph()
        graph.add_nodes_from(range(self.dim))
        for row in ordered.itertuples(index=False):
            graph.add_edge(int(row.i), int(row.j), median_rank=float(row.median))
        return graph

    def to_long_frame(self) -> pd.DataFrame:
        repetition, pair = np.indices(self.ranks.shape)
        return pd.DataFrame(
            {
                "repetition": repetition.ravel(),
                "i": [self.edges[k][0] for k in pair.ravel()],
                "j": [self.edges[k][1] for k in pair.ravel()],
                "rank": self.ranks.ravel(),
            }
        )

    def write(self, directory: str) -> None:
        """Writes ranks.csv (ordered summary), ranks_long.csv and summary.json."""
        self.summary().to_csv(f"{directory}/ranks.csv", index=False, float_format="%.17g")
        self.to_long_frame().to_csv(f"{directory}/ranks_long.csv", index=False)
        with open(f"{directory}/summary.json", "w") as file:
            json.dump(
                {
                    "schema_version": SCHEMA_VERSION,
                    "repetitions": self.repetitions,
                    "skipped": self.skipped,
                    "k_max": self.k_max,
                    "censored_rank": self.censored_rank,
                },
                file,
                indent=2,
            )


def _is_degenerate(subsample: np.ndarray) -> bool:
    return bool(np.any(np.ptp(subsample, axis=0) == 0))


def _subsample_trace(
    s_builder: AnchorBuilder,
    subsample: np.ndarray,
    method: GrowthMethod,
    k_max: int,
    cfg: StoppingConfig,
    inner_rule: SelectionKind,
    seed: int,
    repetition: int,
) -> Optional[GrowthTrace]:
    if _is_degenerate(subsample):
        return None
    s = s_builder(subsample)
    return grow_by_method(s, method, cfg, k_max, seed, repetition, inner_rule)


def draw_subsamples(n: int, n_sub: int, sub_size: int, seed: int) -> List[np.ndarray]:
    """Sorted index sets of `n_sub` subsamples without replacement, drawn sequentially."""
    if not 1 <= sub_size <= n:
        raise ValueError(f"sub_size must be in [1, {n}], but got {sub_size}")
    rng = make_rng(seed, SeedDomain.SUBSAMPLING)
    return [np.sort(rng.choice(n, size=sub_size, replace=False)) for _ in range(n_sub)]


def stability_ranks(
    data: np.ndarray,
    n_sub: int,
    sub_size: int,
    method: GrowthMethod,
    k_max: int,
    seed: int,
    s_builder: Optional[AnchorBuilder] = None,
    cfg: Optional[StoppingConfig] = None,
    inner_rule: SelectionKind = SelectionKind.GSL,
    n_jobs: int = 1,
    ridge_rho: float = DEFAULT_RIDGE_RHO,
    progress: bool = False,
) -> RankDistribution:
    """
    Activation-rank distribution over `n_sub` subsamples of size `sub_size`.

    Subsample indices are drawn up front from the subsampling stream so the result does not
    depend on `n_jobs`. Subsamples with a zero-variance column are skipped and counted.

    Raises:
        ValueError: If `sub_size` exceeds the number of rows.
        DegenerateInputError: If every subsample is degenerate.
    """
    data = np.asarray(data, dtype=float)
    if n_sub < 1:
        raise ValueError(f"n_sub must be positive, but got {n_sub}")
    s_builder = s_builder or partial(build_anchor, rho=ridge_rho)
    cfg = cfg or StoppingConfig()
    subsamples = draw_subsamples(data.shape[0], n_sub, sub_size, seed)
    jobs = (
        delayed(_subsample_trace)(
            s_builder, data[idx], method, k_max, cfg, inner_rule, seed, repetition
        )
        for repetition, idx in enumerate(tqdm(subsamples, disable=not progress, desc="subsamples"))
    )
    results = Parallel(n_jobs=n_jobs)(jobs)
    traces = [trace for trace in results if trace is not None]
    skipped = len(results) - len(traces)
    if skipped:
        logger.warning("Skipped %d degenerate subsample(s) of %d", skipped, n_sub)
    if not traces:
        raise DegenerateInputError("every subsample had a zero-variance column")
    return RankDistribution.from_traces(traces, skipped)
