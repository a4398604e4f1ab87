import logging
import os
from typing import Dict

from seqgrowth.cli.cli_utils import prepare_output_dir, write_manifest
from seqgrowth.configs.run_configs import RunConfig
from seqgrowth.core.base.errors import GrowthAbortedError
from seqgrowth.core.growth.growth import grow_by_method
from seqgrowth.core.growth.growth_trace import GrowthTrace
from seqgrowth.core.matrix.matrix_io import read_matrix, read_table
from seqgrowth.core.matrix.sym_matrix import SymMatrix
from seqgrowth.synthetic.sampling import apply_ridge, build_anchor

logger = logging.getLogger(__name__)


def load_anchor(config: RunConfig) -> SymMatrix:
    """S from the data file (sample covariance) or the matrix file, ridge applied either way."""
    if config.input_path and config.matrix_path:
        raise ValueError("give either --input or --matrix, not both")
    if config.input_path:
        return build_anchor(read_table(config.input_path), config.ridge_rho)
    if config.matrix_path:
        return apply_ridge(read_matrix(config.matrix_path), config.ridge_rho)
    raise ValueError("grow needs --input or --matrix")


def write_trace(trace: GrowthTrace, output_dir: str, stem: str) -> str:
    path = os.path.join(output_dir, f"{stem}.jsonl")
    trace.to_jsonl(path)
    trace.to_csv(os.path.join(output_dir, f"{stem}.csv"))
    return path


def main(config: RunConfig) -> Dict[str, str]:
    """
    Writes trace_<method>.jsonl (with its .meta.json sidecar) and trace_<method>.csv per method.
    A growth aborted by a numerical failure leaves its partial trace as trace_<method>.partial.*.
    """
    s = load_anchor(config)
    output_dir = prepare_output_dir(config.output_dir)
    written = {}
    for method in config.methods:
        try:
            trace = grow_by_method(
                s,
                method,
                config.stopping,
                config.k_max,
                seed=config.root_seed,
                inner_rule=config.inner_rule,
                with_losses=config.with_losses,
                n_jobs=config.n_jobs,
            )
        except GrowthAbortedError as e:
            write_trace(e.partial_trace, output_dir, f"trace_{method.value}.partial")
            raise
        written[method.value] = write_trace(trace, output_dir, f"trace_{method.value}")
        logger.info(
            "%s: %d edge(s), %d inner iteration(s), final loss %s",
            method.value,
            trace.k_max,
            trace.total_inner_iterations(),
            trace.steps[-1].loss_after,
        )
    write_manifest(
        output_dir,
        config.to_document(),
        seeds={"naive_ties": config.root_seed},
        files=sorted(os.path.basename(path) for path in written.values()),
    )
    return written
