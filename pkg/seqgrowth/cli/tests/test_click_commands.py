import json
import os

import pandas as pd
import pytest

from seqgrowth import __version__
from seqgrowth.cli.cli_utils import ExitCode


def read_json(path):
    with open(path) as file:
        return json.load(file)


def test_version(invoke):
    result = invoke("--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_generate_writes_scenario(generated):
    for name in ("sigma.csv", "theta.csv", "edges.csv", "data.csv", "spec.json", "manifest.json"):
        assert os.path.exists(os.path.join(generated, name))
    assert len(pd.read_csv(os.path.join(generated, "edges.csv"))) == 8
    assert pd.read_csv(os.path.join(generated, "data.csv"), header=None).shape == (60, 12)
    manifest = read_json(os.path.join(generated, "manifest.json"))
    assert manifest["seeds"]["root"] == 5
    assert manifest["config"]["command"] == "generate"


def test_generate_is_deterministic(invoke, generated, generate_args, tmp_path):
    again = str(tmp_path / "again")
    invoke(*generate_args, "--output", again)
    for name in ("sigma.csv", "data.csv", "edges.csv"):
        with open(os.path.join(generated, name), "rb") as first:
            with open(os.path.join(again, name), "rb") as second:
                assert first.read() == second.read()


def test_generate_preset_with_overrides(invoke, tmp_path):
    output = str(tmp_path / "hub")
    result = invoke("generate", "--scenario", "hub", "--d", 20, "--output", output)
    assert result.exit_code == 0, result.output
    assert len(pd.read_csv(os.path.join(output, "edges.csv"))) == 15
    assert read_json(os.path.join(output, "spec.json"))["n"] == 90


def write_scenario_config(tmp_path, seed):
    path = tmp_path / "run.json"
    scenario = {"family": "random", "d": 12, "m": 8, "n": 60, "seed": seed}
    path.write_text(json.dumps({"command": "generate", "scenario": scenario}))
    return str(path)


def test_generate_keeps_scenario_seed_from_config_file(invoke, generated, tmp_path):
    config_path = write_scenario_config(tmp_path, seed=5)
    output = str(tmp_path / "from_file")
    result = invoke("generate", "--config", config_path, "--output", output)
    assert result.exit_code == 0, result.output
    assert read_json(os.path.join(output, "spec.json"))["seed"] == 5
    with open(os.path.join(generated, "data.csv"), "rb") as first:
        with open(os.path.join(output, "data.csv"), "rb") as second:
            assert first.read() == second.read()


def test_generate_seed_flag_overrides_config_file(invoke, tmp_path):
    config_path = write_scenario_config(tmp_path, seed=7)
    output = str(tmp_path / "override")
    result = invoke("generate", "--config", config_path, "--seed", 3, "--output", output)
    assert result.exit_code == 0, result.output
    assert read_json(os.path.join(output, "spec.json"))["seed"] == 3


@pytest.mark.parametrize(
    "args",
    [
        ("--family", "random", "--d", 10, "--m", 100),
        ("--family", "hub", "--d", 10, "--eta=-1"),
        ("--d", 20),
    ],
)
def test_generate_rejects_bad_scenarios(invoke, tmp_path, args):
    result = invoke("generate", *args, "--output", tmp_path / "bad")
    assert result.exit_code == ExitCode.CONFIG_ERROR


def test_generate_infeasible_pattern_is_compute_error(invoke, tmp_path):
    result = invoke("generate", "--family", "hub", "--d", 6, "--output", tmp_path / "bad")
    assert result.exit_code == ExitCode.COMPUTE_ERROR


def test_grow_from_data(invoke, generated, tmp_path):
    output = str(tmp_path / "grown")
    data = os.path.join(generated, "data.csv")
    result = invoke(
        "grow", "--input", data, "--methods", "gsl,prec", "--kmax", 10, "--output", output
    )
    assert result.exit_code == 0, result.output
    for method in ("gsl", "prec"):
        assert os.path.exists(os.path.join(output, f"trace_{method}.jsonl"))
        assert os.path.exists(os.path.join(output, f"trace_{method}.meta.json"))
        assert len(pd.read_csv(os.path.join(output, f"trace_{method}.csv"))) == 10
    manifest = read_json(os.path.join(output, "manifest.json"))
    assert manifest["config"]["methods"] == ["gsl", "prec"]
    assert manifest["config"]["k_max"] == 10


def test_grow_from_matrix_with_config_file(invoke, generated, tmp_path):
    config = tmp_path / "grow.json"
    config.write_text(json.dumps({"command": "grow", "methods": ["bbi"], "k_max": 3}))
    output = str(tmp_path / "grown")
    sigma = os.path.join(generated, "sigma.csv")
    result = invoke(
        "grow", "--matrix", sigma, "--config", config, "--tau", 1e-8, "--output", output
    )
    assert result.exit_code == 0, result.output
    manifest = read_json(os.path.join(output, "manifest.json"))
    assert manifest["config"]["stopping"]["tau"] == 1e-8
    assert len(pd.read_csv(os.path.join(output, "trace_bbi.csv"))) == 3


@pytest.mark.parametrize(
    "args",
    [
        ("--methods", "gs"),
        ("--inner-rule", "bfci"),
        ("--tau", 0),
        ("--kmax", 0),
    ],
)
def test_grow_rejects_bad_options(invoke, generated, tmp_path, args):
    result = invoke(
        "grow", "--input", os.path.join(generated, "data.csv"), *args, "--output", tmp_path / "g"
    )
    assert result.exit_code == ExitCode.CONFIG_ERROR


def test_grow_needs_exactly_one_source(invoke, generated, tmp_path):
    data, sigma = os.path.join(generated, "data.csv"), os.path.join(generated, "sigma.csv")
    assert invoke("grow", "--output", tmp_path).exit_code == ExitCode.CONFIG_ERROR
    both = invoke("grow", "--input", data, "--matrix", sigma, "--output", tmp_path)
    assert both.exit_code == ExitCode.CONFIG_ERROR


def test_grow_missing_input_is_io_error(invoke, tmp_path):
    result = invoke("grow", "--input", tmp_path / "missing.csv", "--output", tmp_path)
    assert result.exit_code == ExitCode.IO_ERROR


def test_evaluate(invoke, generated, tmp_path):
    grown = str(tmp_path / "grown")
    data = os.path.join(generated, "data.csv")
    invoke("grow", "--input", data, "--methods", "bbi,pcorr", "--kmax", 10, "--output", grown)
    output = str(tmp_path / "evaluated")
    result = invoke("evaluate", "--truth", generated, "--trace", grown, "--output", output)

    assert result.exit_code == 0, result.output
    summary = pd.read_csv(os.path.join(output, "summary.csv"))
    assert sorted(summary["method"]) == ["bbi", "pcorr"]
    assert summary["auc_median"].between(0, 1).all()
    assert os.path.exists(os.path.join(output, "aggregate_bbi.csv"))
    assert os.path.exists(os.path.join(output, "detection_bbi.csv"))
    assert len(os.listdir(os.path.join(output, "reports"))) == 2


def test_evaluate_dimension_mismatch(invoke, generated, tmp_path):
    small = str(tmp_path / "small")
    invoke("generate", "--family", "random", "--d", 6, "--m", 3, "--output", small)
    grown = str(tmp_path / "grown")
    invoke("grow", "--input", os.path.join(generated, "data.csv"), "--kmax", 2, "--output", grown)

    result = invoke("evaluate", "--truth", small, "--trace", grown, "--output", tmp_path / "e")
    assert result.exit_code == ExitCode.COMPUTE_ERROR


def test_evaluate_missing_truth(invoke, generated, tmp_path):
    grown = str(tmp_path / "grown")
    invoke("grow", "--input", os.path.join(generated, "data.csv"), "--kmax", 2, "--output", grown)
    result = invoke(
        "evaluate", "--truth", tmp_path / "nowhere", "--trace", grown, "--output", tmp_path / "e"
    )
    assert result.exit_code == ExitCode.IO_ERROR


def test_evaluate_malformed_trace(invoke, generated, tmp_path):
    trace = tmp_path / "trace.jsonl"
    trace.write_text("not json\n")
    meta = {"schema_version": 1, "method": "gsl", "d": 12, "k_max": 1}
    (tmp_path / "trace.meta.json").write_text(json.dumps(meta))
    result = invoke("evaluate", "--truth", generated, "--trace", trace, "--output", tmp_path / "e")
    assert result.exit_code == ExitCode.IO_ERROR


def test_stability(invoke, generated, tmp_path):
    output = str(tmp_path / "stability")
    data = os.path.join(generated, "data.csv")
    options = "--method bbi --method prec --nsub 4 --kmax 5 --consensus-k 3".split()
    result = invoke("stability", "--input", data, *options, "--output", output)
    assert result.exit_code == 0, result.output
    for method in ("bbi", "prec"):
        directory = os.path.join(output, method)
        ranks = pd.read_csv(os.path.join(directory, "ranks.csv"))
        assert len(ranks) == 66
        assert len(pd.read_csv(os.path.join(directory, "consensus_edges.csv"))) == 3
        assert read_json(os.path.join(directory, "summary.json"))["repetitions"] == 4
    manifest = read_json(os.path.join(output, "manifest.json"))
    assert manifest["sub_size"] == 30


BENCH = "bench --family random --d 10 --m 5 --n 40 --methods gsl,prec --repetitions 2 --kmax 4"


def bench_args(output):
    return (*BENCH.split(), "--seed", 2, "--output", output)


def test_bench_and_resume(invoke, tmp_path):
    output = str(tmp_path / "bench")
    result = invoke(*bench_args(output))
    assert result.exit_code == 0, result.output

    manifest = read_json(os.path.join(output, "manifest.json"))
    assert len(manifest["runs"]) == 4
    assert {run["status"] for run in manifest["runs"]} == {"success"}
    label = "random_d10_m5_eta0.25"
    trace = os.path.join(output, label, "n40", "gsl", "rep001", "trace.jsonl")
    assert os.path.exists(trace)
    assert os.path.exists(os.path.join(output, label, "truth", "sigma.csv"))
    assert os.path.exists(os.path.join(output, label, "n40", "prec", "aggregate.csv"))
    summary = pd.read_csv(os.path.join(output, "summary.csv"))
    assert sorted(summary["method"]) == ["gsl", "prec"]
    assert os.path.exists(os.path.join(output, "logs", "bench.log"))

    modified = os.stat(trace).st_mtime_ns
    resumed = invoke(*bench_args(output), "--resume")
    assert resumed.exit_code == 0, resumed.output
    assert os.stat(trace).st_mtime_ns == modified


def test_bench_needs_a_scenario(invoke, tmp_path):
    result = invoke("bench", "--output", tmp_path / "bench")
    assert result.exit_code == ExitCode.CONFIG_ERROR
