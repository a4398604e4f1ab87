import os

import pytest

from seqgrowth.core.growth.growth_trace import GrowthMethod
from seqgrowth.core.tasks.bench_task import BenchRun
from seqgrowth.core.tasks.bench_task_executor import IExecuteBehavior
from seqgrowth.synthetic.scenario import GraphFamily, ScenarioSpec


class TouchBehavior(IExecuteBehavior):
    """Writes empty output files and remembers which runs it executed."""

    def __init__(self):
        self.executed = []

    def execute(self, run: BenchRun) -> None:
        os.makedirs(run.run_dir, exist_ok=True)
        for path in (run.trace_path, run.report_path):
            open(path, "w").close()
        self.executed.append(run.repetition)


class FailingBehavior(IExecuteBehavior):
    def execute(self, run: BenchRun) -> None:
        if run.repetition == 1:
            raise RuntimeError("boom")
        TouchBehavior().execute(run)


@pytest.fixture
def spec():
    return ScenarioSpec(family=GraphFamily.RANDOM, d=10, m=5, n=40, seed=3)


@pytest.fixture
def make_runs(spec, tmp_path):
    def make(count=3, method=GrowthMethod.GSL):
        return [BenchRun(spec, "toy", method, r, str(tmp_path)) for r in range(count)]

    return make


@pytest.fixture
def touch_behavior():
    return TouchBehavior()


@pytest.fixture
def failing_behavior():
    return FailingBehavior()
