import click

from seqgrowth.configs.config_enums import ScenarioConfigName
from seqgrowth.core.descent.selection import INNER_KINDS
from seqgrowth.core.growth.growth_trace import GrowthMethod
from seqgrowth.synthetic.scenario import GraphFamily

METHOD_CHOICES = [method.value for method in GrowthMethod]


def _split_methods(ctx, param, value):
    """Accepts repeated flags and comma-separated lists alike."""
    if not value:
        return ()
    methods = []
    for item in value:
        for name in item.split(","):
            name = name.strip().lower()
            if name not in METHOD_CHOICES:
                raise click.BadParameter(f"unknown method '{name}', choose from {METHOD_CHOICES}")
            methods.append(name)
    return tuple(methods)


def common_options(command: click.Command, *args, **kwargs) -> click.Command:
    options = [
        click.option("--output", "output_dir", type=str, help="Directory results are written to."),
        click.option("--jobs", "n_jobs", type=int, help="Number of joblib workers."),
        click.option(
            "--config",
            "config_path",
            type=click.Path(exists=True, dir_okay=False),
            help="A RunConfig JSON document; explicit flags override it.",
        ),
        click.option(
            "-v",
            "--verbose",
            type=bool,
            is_flag=True,
            help="Execute script in verbose mode?",
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def stopping_options(command: click.Command, *args, **kwargs) -> click.Command:
    options = [
        click.option("--alpha", type=float, help="Iteration cap slope, cap = ⌈α·m + β⌉."),
        click.option("--beta", type=float, help="Iteration cap offset."),
        click.option("--tau", type=float, help="Relative improvement threshold."),
        click.option("--hard-cap", "hard_cap", type=int, help="Absolute iteration cap."),
        click.option(
            "--inner-rule",
            "inner_rule",
            type=click.Choice([kind.value for kind in INNER_KINDS]),
            help="Selection rule of the full corrections (default gsl).",
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def method_options(command: click.Command, *args, **kwargs) -> click.Command:
    options = [
        click.option(
            "--method",
            "--methods",
            "methods",
            multiple=True,
            callback=_split_methods,
            help=f"Growth method(s), repeated or comma-separated: {','.join(METHOD_CHOICES)}.",
        ),
        click.option("--kmax", "k_max", type=int, help="Edges per growth (default: all pairs)."),
        click.option("--seed", type=int, help="Root seed."),
        click.option("--ridge-rho", "ridge_rho", type=float, help="Ridge factor (default 1e-6)."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def scenario_options(command: click.Command, *args, **kwargs) -> click.Command:
    options = [
        click.option(
            "--scenario",
            "scenario_names",
            multiple=True,
            type=click.Choice([name.value for name in ScenarioConfigName]),
            help="Named scenario preset; may be repeated in bench.",
        ),
        click.option(
            "--family",
            type=click.Choice([family.value for family in GraphFamily]),
            help="Graph family.",
        ),
        click.option("--d", type=int, help="Dimension."),
        click.option("--m", type=int, help="Number of edges (random family)."),
        click.option("--eta", type=float, help="Diagonal conditioning shift η."),
        click.option("--external-path", "external_path", type=str, help="SPD matrix file."),
        click.option("--block-offset", "block_offset", type=int, help="External block offset."),
        click.option("--block-size", "block_size", type=int, help="External block size."),
    ]
    for option in reversed(options):
        command = option(command)
    return command
