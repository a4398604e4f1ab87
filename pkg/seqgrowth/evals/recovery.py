"""Graph-recovery metrics of growth traces against a known true edge set."""
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from seqgrowth.core.base.errors import DimensionMismatchError
from seqgrowth.core.growth.growth_trace import SCHEMA_VERSION, GrowthTrace
from seqgrowth.core.matrix.sym_matrix import Edge
from seqgrowth.synthetic.scenario import GroundTruth

logger = logging.getLogger(__name__)

PERCENTILES = (10, 50, 90)
CURVE_METRICS = ("precision", "recall", "fpr")


@dataclass(frozen=True)
class ConfusionPoint:
    k: int
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    fpr: float


@dataclass
class RecoveryReport:
    """
    Confusion counts of every prefix of a trace and the ROC area.

    Recall is reported as 0 when there are no true edges, and the false-positive rate as 0 when
    every pair is a true edge.
    """

    per_k: List[ConfusionPoint]
    auc_roc: float
    method: str
    scenario: str = ""
    d: int = 0
    m_true: int = 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(point) for point in self.per_k])

    def to_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    def to_json(self, path: str) -> None:
        document = {
            "schema_version": SCHEMA_VERSION,
            "method": self.method,
            "scenario": self.scenario,
            "d": self.d,
            "m_true": self.m_true,
            "auc_roc": self.auc_roc,
            "per_k": [asdict(point) for point in self.per_k],
        }
        with open(path, "w") as file:
            json.dump(document, file, indent=2)


@dataclass
class CurveSummary:
    """Pointwise 10th/50th/90th percentiles (linear interpolation) of the curves per k."""

    k: np.ndarray
    bands: Dict[str, np.ndarray]
    auc_band: np.ndarray
    n_reports: int
    method: str = ""

    def median(self, metric: str) -> np.ndarray:
        return self.bands[metric][1]

    def to_frame(self) -> pd.DataFrame:
        columns: Dict[str, np.ndarray] = {"k": self.k}
        for metric in CURVE_METRICS:
            for position, percentile in enumerate(PERCENTILES):
                name = "median" if percentile == 50 else f"p{percentile}"
                columns[f"{metric}_{name}"] = self.bands[metric][position]
        return pd.DataFrame(columns)

    def to_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


@dataclass
class DetectionFrequency:
    """Per-edge detection frequencies among the first k edges of every trace."""

    k: int
    n_traces: int
    true_edges: Dict[Edge, float] = field(default_factory=dict)
    false_positives: Dict[Edge, float] = field(default_factory=dict)

    def as_dict(self) -> Dict[Edge, float]:
        return {**self.true_edges, **self.false_positives}

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"i": i, "j": j, "true_edge": True, "frequency": value}
            for (i, j), value in sorted(self.true_edges.items())
        ] + [
            {"i": i, "j": j, "true_edge": False, "frequency": value}
            for (i, j), value in sorted(self.false_positives.items())
        ]
        return pd.DataFrame(rows, columns=["i", "j", "true_edge", "frequency"])


def score_recovery(trace: GrowthTrace, truth: GroundTruth, scenario: str = "") -> RecoveryReport:
    """
    Computes confusion counts for every prefix of `trace` and the ROC area (trapezoid over
    (fpr, recall) with the endpoints (0, 0) and (1, 1)).

    Raises:
        DimensionMismatchError: If the trace and the truth differ in dimension.
    """
    if trace.d != truth.dim:
        raise DimensionMismatchError(truth.dim, trace.d, what="trace")
    true_set = truth.true_edges.edge_set
    m_true = len(true_set)
    negatives = trace.max_edges - m_true

    points = []
    tp = 0
    for step in trace.steps:
        tp += step.edge in true_set
        k = step.k
        fp = k - tp
        points.append(
            ConfusionPoint(
                k=k,
                tp=tp,
                fp=fp,
                fn=m_true - tp,
                tn=negatives - fp,
                precision=tp / k,
                recall=tp / m_true if m_true else 0.0,
                fpr=fp / negatives if negatives else 0.0,
            )
        )
    fpr = np.array([0.0] + [p.fpr for p in points] + [1.0])
    recall = np.array([0.0] + [p.recall for p in points] + [1.0])
    auc = float(trapezoid(recall, fpr))
    return RecoveryReport(points, auc, trace.method.value, scenario, trace.d, m_true)


def aggregate(reports: Sequence[RecoveryReport]) -> CurveSummary:
    """
    Pointwise median and interdecile band of precision, recall and fpr over `reports`.

    Raises:
        ValueError: If `reports` is empty or the reports do not share d and the k range.
    """
    if not reports:
        raise ValueError("cannot aggregate an empty list of reports")
    d = {report.d for report in reports}
    lengths = {len(report.per_k) for report in reports}
    if len(d) != 1 or len(lengths) != 1:
        raise ValueError(f"reports must share d and k range, got d={d} and lengths={lengths}")
    bands = {}
    for metric in CURVE_METRICS:
        values = np.array([[getattr(p, metric) for p in report.per_k] for report in reports])
        bands[metric] = np.percentile(values, PERCENTILES, axis=0, method="linear")
    aucs = np.array([report.auc_roc for report in reports])
    return CurveSummary(
        k=np.array([p.k for p in reports[0].per_k]),
        bands=bands,
        auc_band=np.percentile(aucs, PERCENTILES, method="linear"),
        n_reports=len(reports),
        method=reports[0].method,
    )


def detection_frequency(
    traces: Sequence[GrowthTrace], truth: GroundTruth, k: int
) -> DetectionFrequency:
    """
    Fraction of traces whose first-k prefix contains each edge. True edges are all listed;
    false positives only when detected at least once.

    Raises:
        ValueError: If some trace has fewer than k steps.
    """
    if not traces:
        raise ValueError("no traces given")
    short = [trace.k_max for trace in traces if trace.k_max < k]
    if short:
        raise ValueError(f"k={k} exceeds the length of {len(short)} trace(s)")
    counts: Dict[Edge, int] = {}
    for trace in traces:
        for edge in trace.edges(k):
            counts[edge] = counts.get(edge, 0) + 1
    total = len(traces)
    true_set = truth.true_edges.edge_set
    result = DetectionFrequency(k, total)
    for edge in sorted(true_set):
        result.true_edges[edge] = counts.get(edge, 0) / total
    for edge, count in sorted(counts.items()):
        if edge not in true_set:
            result.false_positives[edge] = count / total
    return result


def summary_row(summary: CurveSummary, k: Optional[int] = None) -> Dict[str, Any]:
    """Median AUC and, at step `k`, the median precision and recall."""
    row = {
        "method": summary.method,
        "n_reports": summary.n_reports,
        "auc_median": float(summary.auc_band[1]),
    }
    if k is not None:
        position = int(np.searchsorted(summary.k, k))
        row["precision_median"] = float(summary.median("precision")[position])
        row["recall_median"] = float(summary.median("recall")[position])
    return row
