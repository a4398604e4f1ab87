import json
import logging
import os
from enum import IntEnum
from typing import Any, Dict, List, Optional, TypedDict, Union, cast

import colorlog
import numpy as np
import yaml


class SeedDomain(IntEnum):
    """
    SeedDomain: independent random streams derived from one user seed.
    Drawing from one stream never shifts another.
    """

    DATA_GENERATION = 1
    SAMPLING = 2
    SUBSAMPLING = 3
    NAIVE_TIES = 4


def derive_seed(seed: int, domain: SeedDomain, index: int = 0) -> np.random.SeedSequence:
    """Returns the seed sequence of repetition `index` within `domain`."""
    return np.random.SeedSequence([int(seed), int(domain), int(index)])


def make_rng(seed: int, domain: SeedDomain, index: int = 0) -> np.random.Generator:
    """
    Returns a counter-based (Philox) generator for the given seed, domain and index.

    Philox streams are versioned by numpy and identical across platforms.
    """
    return np.random.Generator(np.random.Philox(derive_seed(seed, domain, index)))


def root_py_path() -> str:
    """
    Returns the path to the root of the project python code.

    Returns:
    - A path object in string form

    """
    script_dir = os.path.dirname(os.path.realpath(__file__))
    return os.path.join(script_dir, "..")


def config_path() -> str:
    """
    Returns the path to the project config directory

    Returns:
    - A path object in string form

    """
    return os.path.join(root_py_path(), "configs")


def load_config(config_name: str, file_name: str, config_type: str = "yaml") -> Any:
    """
    Loads a config file shipped with the package.

    Args:
        config_name (str): The config folder, e.g. "scenario_configs".
        file_name (str): The file name without extension.
        config_type (str): Either "yaml" or "json".

    Returns:
        Any: The content of the file as a Python object.
    """
    with open(os.path.join(config_path(), config_name, f"{file_name}.{config_type}"), "r") as file:
        if config_type == "yaml":
            return yaml.safe_load(file)
        elif config_type == "json":
            return json.load(file)
        raise ValueError(f"Unsupported config type {config_type}")


LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "bold_red",
}

# third-party loggers that flood DEBUG output during bench sweeps
QUIET_LOGGERS = ("joblib", "matplotlib", "numexpr")


class HandlerDict(TypedDict, total=False):
    class_: str
    formatter: str
    level: int
    filename: str
    mode: str


class RootDict(TypedDict):
    handlers: List[str]
    level: int


class LoggingConfig(TypedDict, total=False):
    version: int
    disable_existing_loggers: bool
    formatters: Dict[str, dict]
    handlers: Dict[str, Union[HandlerDict, dict]]
    loggers: Dict[str, dict]
    root: RootDict


def get_logging_config(
    log_level: int = logging.INFO, log_file: Optional[str] = None
) -> Dict[str, Any]:
    """
    Returns a `logging.config.dictConfig` dictionary.

    The console gets colored `LEVEL:logger:message` lines. With `log_file`, a plain copy with
    timestamps and process ids (bench runs log from joblib workers) is appended to that file, so
    a resumed bench keeps the log of the interrupted one.
    """
    handlers: Dict[str, Union[HandlerDict, dict]] = {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "colored",
            "level": log_level,
        }
    }
    if log_file:
        handlers["file"] = {
            "class": "logging.FileHandler",
            "filename": log_file,
            "mode": "a",
            "formatter": "plain",
            "level": log_level,
        }

    logging_config: LoggingConfig = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "colored": {
                "()": colorlog.ColoredFormatter,
                "format": "%(log_color)s%(levelname)s:%(name)s:%(message)s",
                "log_colors": LOG_COLORS,
            },
            "plain": {
                "format": "%(asctime)s [%(process)d] %(levelname)s %(name)s: %(message)s",
            },
        },
        "handlers": handlers,
        "loggers": {name: {"level": logging.WARNING} for name in QUIET_LOGGERS},
        "root": {"handlers": list(handlers), "level": log_level},
    }
    return cast(Dict[str, Any], logging_config)
