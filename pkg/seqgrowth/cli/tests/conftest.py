import os

import pytest
from click.testing import CliRunner

from seqgrowth.cli.click_commands import cli

GENERATE = "generate --family random --d 12 --m 8 --n 60 --seed 5"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def invoke(runner):
    def run(*args):
        return runner.invoke(cli, [str(arg) for arg in args])

    return run


@pytest.fixture
def generated(invoke, tmp_path):
    """A random scenario with d=12, 8 true edges and 60 samples."""
    output = os.path.join(str(tmp_path), "generated")
    result = invoke(*GENERATE.split(), "--output", output)
    assert result.exit_code == 0, result.output
    return output


@pytest.fixture
def generate_args():
    return GENERATE.split()
