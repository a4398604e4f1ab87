import functools
import json
import logging
import logging.config
import os
from enum import IntEnum
from typing import Any, Callable, Dict, List, Optional

import click
import numpy as np
from pydantic import ValidationError

from seqgrowth import __version__
from seqgrowth.configs.config_enums import ScenarioConfigName
from seqgrowth.core.base.errors import ComputeError, DataFormatError
from seqgrowth.core.growth.growth_trace import SCHEMA_VERSION
from seqgrowth.core.utils import get_logging_config
from seqgrowth.synthetic.scenario import ScenarioSpec

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
SCENARIO_FLAGS = ("family", "d", "m", "eta", "n", "external_path", "block_offset", "block_size")


class ExitCode(IntEnum):
    SUCCESS = 0
    CONFIG_ERROR = 2
    COMPUTE_ERROR = 3
    IO_ERROR = 4


def reconfigure_logging(verbose: bool, log_file: Optional[str] = None) -> None:
    """
    Configure the logging settings.

    :param verbose: Boolean, if True, set log level to DEBUG, else set to INFO.
    :param log_file: Optional file receiving a plain copy of the log.
    """
    log_level = logging.DEBUG if verbose else logging.INFO
    logging.config.dictConfig(get_logging_config(log_level=log_level, log_file=log_file))


def exit_code_for(error: BaseException) -> ExitCode:
    """Maps an exception to the CLI exit code of its category."""
    if isinstance(error, (ComputeError, np.linalg.LinAlgError)):
        return ExitCode.COMPUTE_ERROR
    if isinstance(error, (DataFormatError, OSError)):
        return ExitCode.IO_ERROR
    if isinstance(error, (ValidationError, ValueError, click.BadParameter)):
        return ExitCode.CONFIG_ERROR
    raise error


def handle_errors(command: Callable) -> Callable:
    """Turns library exceptions raised by a command into a logged message and an exit code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except click.exceptions.Exit:
            raise
        except click.ClickException:
            raise
        except Exception as e:
            code = exit_code_for(e)
            logger.error("%s: %s", type(e).__name__, e)
            raise click.exceptions.Exit(int(code)) from e

    return wrapper


def prepare_output_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def write_manifest(directory: str, config: Dict[str, Any], **extra: Any) -> str:
    """
    Writes `manifest.json`: library version, resolved configuration and any extra records
    (seeds, produced files) needed to reproduce the directory.
    """
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "config": config,
        **extra,
    }
    path = os.path.join(directory, MANIFEST_NAME)
    with open(path, "w") as file:
        json.dump(manifest, file, indent=2, sort_keys=True)
    return path


def pop_scenario_flags(kwargs: Dict[str, Any]) -> Dict[str, Any]:
    """
    Moves the scenario flags out of `kwargs` into `scenario` / `scenario_names` entries.

    A single preset combined with explicit scenario flags becomes an explicit scenario built from
    the preset with those flags applied.
    """
    flags = {name: kwargs.pop(name, None) for name in SCENARIO_FLAGS}
    flags = {name: value for name, value in flags.items() if value is not None}
    names: List[str] = list(kwargs.get("scenario_names") or ())
    if not flags:
        return kwargs
    if "family" in flags:
        kwargs["scenario"] = flags
    elif len(names) == 1:
        preset = ScenarioSpec.load(names[0], **flags)
        kwargs["scenario"] = json.loads(preset.json())
        kwargs["scenario_names"] = ()
    else:
        raise click.BadParameter(
            f"{', '.join(sorted(flags))} need --family or exactly one --scenario preset"
        )
    return kwargs


def scenario_label(spec: ScenarioSpec) -> str:
    label = f"{spec.family.value}_d{spec.d}"
    if spec.m is not None:
        label += f"_m{spec.m}"
    return f"{label}_eta{spec.eta:g}"


def resolve_scenarios(config) -> Dict[str, ScenarioSpec]:
    """
    The scenarios of a run config by label: every named preset plus the explicit scenario. An
    explicit root seed replaces the seed of every scenario; otherwise each keeps its own.
    """
    scenarios: Dict[str, ScenarioSpec] = {}
    for name in config.scenario_names:
        scenarios[ScenarioConfigName(name).value] = ScenarioSpec.load(name, seed=config.seed)
    if config.scenario is not None:
        spec = config.scenario
        if config.seed is not None:
            spec = spec.copy(update={"seed": config.seed})
        scenarios[scenario_label(spec)] = spec
    return scenarios
