import glob
import logging
import os
from collections import defaultdict
from typing import Dict, List

import pandas as pd

from seqgrowth.cli.cli_utils import prepare_output_dir, write_manifest
from seqgrowth.configs.run_configs import RunConfig
from seqgrowth.core.growth.growth_trace import GrowthTrace
from seqgrowth.evals.recovery import (
    RecoveryReport,
    aggregate,
    detection_frequency,
    score_recovery,
    summary_row,
)
from seqgrowth.synthetic.scenario import GroundTruth

logger = logging.getLogger(__name__)

SUMMARY_NAME = "summary.csv"


def collect_trace_paths(paths: List[str]) -> List[str]:
    """Expands directories into the trace files they contain, recursively, in sorted order."""
    collected = []
    for path in paths:
        if os.path.isdir(path):
            pattern = os.path.join(path, "**", "*.jsonl")
            collected.extend(sorted(glob.glob(pattern, recursive=True)))
        elif os.path.exists(path):
            collected.append(path)
        else:
            raise FileNotFoundError(f"no such trace file or directory: {path}")
    return [path for path in collected if not path.endswith(".partial.jsonl")]


def report_name(path: str, root: str) -> str:
    relative = os.path.relpath(os.path.splitext(path)[0], root)
    return relative.replace(os.sep, "__") + "_report.csv"


def main(config: RunConfig) -> Dict[str, str]:
    """
    Writes one recovery report per trace under reports/, and per method an aggregate CSV
    (pointwise median and deciles) and the detection frequencies at k = m_true. summary.csv holds
    one row per method.
    """
    if not config.truth_dir:
        raise ValueError("evaluate needs --truth")
    truth = GroundTruth.read(config.truth_dir)
    paths = collect_trace_paths(config.trace_paths)
    if not paths:
        raise ValueError("no trace files to evaluate")

    output_dir = prepare_output_dir(config.output_dir)
    reports_dir = prepare_output_dir(os.path.join(output_dir, "reports"))
    root = os.path.commonpath([os.path.dirname(os.path.abspath(path)) for path in paths])
    traces: Dict[str, List[GrowthTrace]] = defaultdict(list)
    reports: Dict[str, List[RecoveryReport]] = defaultdict(list)
    for path in paths:
        trace = GrowthTrace.from_jsonl(path)
        report = score_recovery(trace, truth)
        report.to_csv(os.path.join(reports_dir, report_name(os.path.abspath(path), root)))
        traces[trace.method.value].append(trace)
        reports[trace.method.value].append(report)

    m_true = len(truth.true_edges)
    written = {}
    rows = []
    for method in sorted(reports):
        summary = aggregate(reports[method])
        path = os.path.join(output_dir, f"aggregate_{method}.csv")
        summary.to_csv(path)
        written[method] = path
        k_eval = m_true if 1 <= m_true <= summary.k[-1] else None
        rows.append(summary_row(summary, k_eval))
        if k_eval is not None:
            frequency = detection_frequency(traces[method], truth, k_eval)
            frequency.to_frame().to_csv(
                os.path.join(output_dir, f"detection_{method}.csv"), index=False
            )
        logger.info(
            "%s: %d trace(s), median AUC %.4f", method, summary.n_reports, summary.auc_band[1]
        )
    pd.DataFrame(rows).to_csv(
        os.path.join(output_dir, SUMMARY_NAME), index=False, float_format="%.17g"
    )
    write_manifest(
        output_dir, config.to_document(), traces=[os.path.relpath(p, root) for p in paths]
    )
    return written
