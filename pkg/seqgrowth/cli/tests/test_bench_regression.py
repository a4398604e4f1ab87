import filecmp
import glob
import json
import os

import pytest

from seqgrowth.core.growth.growth_trace import GrowthTrace

BENCH = "bench --family random --d 20 --m 15 --n 60 --kmax 25 --methods gsl,bbi,bfci,prec,pcorr"


def run_bench(invoke, output):
    options = ("--repetitions", 3, "--bfci-repetitions", 2, "--output", output)
    result = invoke(*BENCH.split(), *options)
    assert result.exit_code == 0, result.output
    return sorted(
        os.path.relpath(path, output)
        for pattern in ("*.jsonl", "*.meta.json", "report.csv", "trace.csv")
        for path in glob.glob(os.path.join(output, "**", pattern), recursive=True)
    )


@pytest.mark.regression
def test_bench_is_deterministic(invoke, tmp_path):
    first, second = str(tmp_path / "first"), str(tmp_path / "second")
    files = run_bench(invoke, first)
    assert files == run_bench(invoke, second)
    assert len(files) == 4 * (3 * 4 + 2)

    _, mismatch, errors = filecmp.cmpfiles(first, second, files, shallow=False)
    assert mismatch == [] and errors == []


@pytest.mark.regression
def test_bench_losses_never_increase(invoke, tmp_path):
    output = str(tmp_path / "bench")
    run_bench(invoke, output)
    with open(os.path.join(output, "manifest.json")) as file:
        runs = json.load(file)["runs"]
    assert {run["status"] for run in runs} == {"success"}
    for path in glob.glob(os.path.join(output, "**", "trace.jsonl"), recursive=True):
        assert GrowthTrace.from_jsonl(path).loss_increases() == []
