import logging
import os

from seqgrowth.cli.cli_utils import prepare_output_dir, resolve_scenarios, write_manifest
from seqgrowth.configs.run_configs import RunConfig
from seqgrowth.core.matrix.matrix_io import write_table
from seqgrowth.core.utils import SeedDomain
from seqgrowth.synthetic.sampling import sample_gaussian
from seqgrowth.synthetic.scenario import build_truth, scenario_document

logger = logging.getLogger(__name__)

DATA_NAME = "data.csv"
SPEC_NAME = "spec.json"


def main(config: RunConfig) -> str:
    """
    Writes sigma.csv, theta.csv, edges.csv, data.csv, spec.json and a manifest for a single
    scenario into the output directory.
    """
    scenarios = resolve_scenarios(config)
    if len(scenarios) != 1:
        raise ValueError(f"generate needs exactly one scenario, got {len(scenarios)}")
    label, spec = next(iter(scenarios.items()))
    output_dir = prepare_output_dir(config.output_dir)

    truth = build_truth(spec)
    truth.write(output_dir)
    data = sample_gaussian(truth, spec.n, spec.seed)
    write_table(os.path.join(output_dir, DATA_NAME), data)
    with open(os.path.join(output_dir, SPEC_NAME), "w") as file:
        file.write(scenario_document(spec))

    write_manifest(
        output_dir,
        config.to_document(),
        scenario=label,
        seeds={
            "root": spec.seed,
            "data_generation": [spec.seed, int(SeedDomain.DATA_GENERATION)],
            "sampling": [spec.seed, int(SeedDomain.SAMPLING), 0],
        },
        files=["sigma.csv", "theta.csv", "edges.csv", DATA_NAME, SPEC_NAME],
    )
    logger.info(
        "Wrote %s (d=%d, %d true edges, n=%d) to %s",
        label,
        truth.dim,
        len(truth.true_edges),
        spec.n,
        output_dir,
    )
    return output_dir
