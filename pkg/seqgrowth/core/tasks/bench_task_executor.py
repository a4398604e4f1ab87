import logging
import os
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from joblib import Parallel, delayed
from tqdm import tqdm

from seqgrowth.core.descent.descent import StoppingConfig
from seqgrowth.core.descent.selection import SelectionKind
from seqgrowth.core.growth.growth import grow_by_method
from seqgrowth.core.growth.growth_trace import GrowthTrace
from seqgrowth.core.tasks.bench_task import BenchRun, RunStatus
from seqgrowth.core.tasks.bench_task_registry import BenchRunRegistry
from seqgrowth.evals.recovery import score_recovery
from seqgrowth.synthetic.sampling import DEFAULT_RIDGE_RHO, build_anchor, sample_gaussian
from seqgrowth.synthetic.scenario import GroundTruth

logger = logging.getLogger(__name__)


class IExecuteBehavior(ABC):
    """
    Interface for executing bench runs.
    """

    @abstractmethod
    def execute(self, run: BenchRun) -> None:
        pass


@dataclass
class GrowthExecuteBehavior(IExecuteBehavior):
    """
    Samples the run's data, grows the graph and writes the trace and its recovery report.

    The data of a repetition depend only on the scenario seed and the repetition index, so all
    methods of a repetition see the same sample.
    """

    truths: Dict[str, GroundTruth]
    cfg: StoppingConfig = field(default_factory=StoppingConfig)
    k_max: Optional[int] = None
    inner_rule: SelectionKind = SelectionKind.GSL
    ridge_rho: float = DEFAULT_RIDGE_RHO
    with_losses: bool = False

    def grow(self, run: BenchRun) -> GrowthTrace:
        truth = self.truths[run.scenario_name]
        data = sample_gaussian(truth, run.n, run.seed, index=run.repetition)
        s = build_anchor(data, self.ridge_rho)
        return grow_by_method(
            s,
            run.method,
            self.cfg,
            self.k_max,
            seed=run.seed,
            tie_index=run.repetition,
            inner_rule=self.inner_rule,
            with_losses=self.with_losses,
        )

    def execute(self, run: BenchRun) -> None:
        trace = self.grow(run)
        increases = trace.loss_increases()
        if increases:
            logger.warning("%s: loss increased at step(s) %s", run, increases)
        os.makedirs(run.run_dir, exist_ok=True)
        trace.to_jsonl(run.trace_path)
        trace.to_csv(os.path.join(run.run_dir, BenchRun.TRACE_TABLE_NAME))
        report = score_recovery(trace, self.truths[run.scenario_name], run.scenario_name)
        report.to_csv(run.report_path)


def execute_detached(behavior: IExecuteBehavior, run: BenchRun) -> BenchRun:
    """
    Executes `run` without an observer (it may be in a worker process) and records the outcome
    on the run. Failures are logged and recorded, never raised.
    """
    run.observer = None
    start = time.perf_counter()
    run.status = RunStatus.RUNNING
    try:
        behavior.execute(run)
        run.error = None
        run.status = RunStatus.SUCCESS
    except Exception as e:
        logger.exception("BenchRun %s failed: %s", run.run_id, e)
        run.error = f"{type(e).__name__}: {e}"
        run.status = RunStatus.FAILED
    run.seconds = round(time.perf_counter() - start, 6)
    return run


class BenchTaskExecutor:
    """
    Executes bench runs with a behaviour and records every outcome in the registry.
    """

    def __init__(
        self, execute_behavior: IExecuteBehavior, registry: BenchRunRegistry, n_jobs: int = 1
    ):
        self.execute_behavior = execute_behavior
        self.registry = registry
        self.n_jobs = n_jobs

    def execute(self, run: BenchRun) -> BenchRun:
        """Executes a single run in-process."""
        finished = execute_detached(self.execute_behavior, run)
        self.registry.initialize_run(finished)
        self.registry.update_run(finished)
        return finished

    def execute_all(
        self, runs: Sequence[BenchRun], resume: bool = False, progress: bool = True
    ) -> List[BenchRun]:
        """
        Executes `runs` over a joblib pool. With `resume`, runs recorded as successful whose files
        exist are skipped. Returns the runs that were executed, in submission order.
        """
        pending = []
        for run in runs:
            if resume and self.registry.is_complete(run):
                logger.debug("Skipping completed %s", run)
                continue
            run.observer = None
            pending.append(run)
        logger.info(
            "Executing %d bench run(s), %d already complete",
            len(pending),
            len(runs) - len(pending),
        )
        jobs = (delayed(execute_detached)(self.execute_behavior, run) for run in pending)
        finished = []
        results = Parallel(n_jobs=self.n_jobs, return_as="generator")(jobs)
        for run in tqdm(results, total=len(pending), disable=not progress, desc="bench runs"):
            self.registry.initialize_run(run)
            self.registry.update_run(run)
            if run.status == RunStatus.FAILED:
                logger.warning("%s failed: %s", run, run.error)
            finished.append(run)
        return finished
