import logging
import os
from typing import Dict

from seqgrowth.cli.cli_utils import prepare_output_dir, write_manifest
from seqgrowth.configs.run_configs import RunConfig
from seqgrowth.core.matrix.matrix_io import read_table
from seqgrowth.core.utils import SeedDomain
from seqgrowth.evals.stability import RankDistribution, stability_ranks
from seqgrowth.synthetic.scenario import write_edges

logger = logging.getLogger(__name__)


def main(config: RunConfig) -> Dict[str, RankDistribution]:
    """
    Writes, per method, ranks.csv (per-edge rank summary ordered by median rank),
    ranks_long.csv, summary.json and, with a consensus size, consensus_edges.csv.
    """
    if not config.input_path:
        raise ValueError("stability needs --input")
    data = read_table(config.input_path)
    n, d = data.shape
    sub_size = config.sub_size or n // 2
    k_max = config.k_max or d * (d - 1) // 2
    output_dir = prepare_output_dir(config.output_dir)

    distributions = {}
    for method in config.methods:
        logger.info(
            "%s: %d subsample(s) of size %d, %d edge(s) each",
            method.value,
            config.n_sub,
            sub_size,
            k_max,
        )
        distribution = stability_ranks(
            data,
            config.n_sub,
            sub_size,
            method,
            k_max,
            config.root_seed,
            cfg=config.stopping,
            inner_rule=config.inner_rule,
            n_jobs=config.n_jobs,
            ridge_rho=config.ridge_rho,
            progress=True,
        )
        method_dir = prepare_output_dir(os.path.join(output_dir, method.value))
        distribution.write(method_dir)
        if config.consensus_k:
            write_edges(
                os.path.join(method_dir, "consensus_edges.csv"),
                distribution.consensus_edges(config.consensus_k),
            )
        if distribution.skipped:
            logger.warning(
                "%s: %d of %d subsample(s) skipped",
                method.value,
                distribution.skipped,
                config.n_sub,
            )
        distributions[method.value] = distribution
    write_manifest(
        output_dir,
        config.to_document(),
        seeds={"subsampling": [config.root_seed, int(SeedDomain.SUBSAMPLING)]},
        sub_size=sub_size,
        k_max=k_max,
        skipped={method: dist.skipped for method, dist in distributions.items()},
    )
    return distributions
