import click

from seqgrowth import __version__
from seqgrowth.configs.run_configs import CommandName, RunConfig

from .cli_utils import handle_errors, pop_scenario_flags, reconfigure_logging
from .click_options import common_options, method_options, scenario_options, stopping_options


def _resolve(command: CommandName, kwargs) -> RunConfig:
    config_path = kwargs.pop("config_path", None)
    return RunConfig.resolve(command, config_path, **kwargs)


@click.group()
@click.version_option(version=__version__)
@click.pass_context
def cli(ctx):
    pass


@cli.command()
@common_options
@scenario_options
@click.option("--n", type=int, help="Sample size.")
@click.option("--seed", type=int, help="Seed of the generation and sampling streams.")
@click.pass_context
@handle_errors
def generate(ctx, *args, **kwargs):
    """Writes a ground truth, a sample and the resolved scenario."""
    from .scripts.run_generate import main

    reconfigure_logging(kwargs.pop("verbose"))
    config = _resolve(CommandName.GENERATE, pop_scenario_flags(kwargs))
    main(config)


@cli.command()
@common_options
@method_options
@stopping_options
@click.option(
    "--input", "input_path", type=str, help="Data CSV, one sample per row, no header."
)
@click.option("--matrix", "matrix_path", type=str, help="Covariance matrix (.csv or .json).")
@click.option(
    "--with-losses", "with_losses", is_flag=True, default=None, help="Losses for naive orderings."
)
@click.pass_context
@handle_errors
def grow(ctx, *args, **kwargs):
    """Grows one trace per method from data or a covariance matrix."""
    from .scripts.run_grow import main

    reconfigure_logging(kwargs.pop("verbose"))
    main(_resolve(CommandName.GROW, kwargs))


@cli.command()
@common_options
@click.option("--truth", "truth_dir", type=str, help="Directory with sigma/theta/edges CSVs.")
@click.option(
    "--trace",
    "trace_paths",
    multiple=True,
    type=str,
    help="Trace JSONL file or directory searched recursively; may be repeated.",
)
@click.pass_context
@handle_errors
def evaluate(ctx, *args, **kwargs):
    """Scores traces against a ground truth and aggregates them per method."""
    from .scripts.run_evaluate import main

    reconfigure_logging(kwargs.pop("verbose"))
    main(_resolve(CommandName.EVALUATE, kwargs))


@cli.command()
@common_options
@method_options
@stopping_options
@click.option("--input", "input_path", type=str, help="Data CSV, one sample per row.")
@click.option("--nsub", "n_sub", type=int, help="Number of subsamples (default 500).")
@click.option("--subsize", "sub_size", type=int, help="Subsample size (default ⌊n/2⌋).")
@click.option("--consensus-k", "consensus_k", type=int, help="Size of the consensus graph.")
@click.pass_context
@handle_errors
def stability(ctx, *args, **kwargs):
    """Activation-rank distributions over random subsamples."""
    from .scripts.run_stability import main

    reconfigure_logging(kwargs.pop("verbose"))
    main(_resolve(CommandName.STABILITY, kwargs))


@cli.command()
@common_options
@method_options
@stopping_options
@scenario_options
@click.option("--n", "sample_sizes", type=int, multiple=True, help="Sample size(s) to sweep.")
@click.option("--repetitions", type=int, help="Repetitions per method (default 100).")
@click.option(
    "--bfci-repetitions", "bfci_repetitions", type=int, help="Repetitions of BFCI (default 10)."
)
@click.option(
    "--resume", is_flag=True, default=None, help="Skip runs already recorded as successful."
)
@click.pass_context
@handle_errors
def bench(ctx, *args, **kwargs):
    """Sweeps scenarios × sample sizes × methods × repetitions."""
    from .scripts.run_bench import main

    verbose = kwargs.pop("verbose")
    reconfigure_logging(verbose)
    config = _resolve(CommandName.BENCH, pop_scenario_flags(kwargs))
    main(config, verbose)
