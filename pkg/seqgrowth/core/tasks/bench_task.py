import json
import logging
import os
import uuid
from enum import Enum
from typing import Any, Callable, Dict, Optional

from seqgrowth.core.growth.growth_trace import GrowthMethod
from seqgrowth.synthetic.scenario import ScenarioSpec

logger = logging.getLogger(__name__)

RUN_NAMESPACE = uuid.UUID("6f1d9a52-33c4-4c1e-9a51-2b8f0d7e4c10")


class RunStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    SUCCESS = "success"
    FAILED = "failed"


class BenchRun:
    """
    One repetition of one growth method on one scenario at one sample size.

    The run id is a uuid5 of the run's defining fields, so the same sweep always produces the
    same ids and a manifest can be resumed. Setting `status` notifies the observer, which is how
    the registry keeps the manifest current.
    """

    TRACE_NAME = "trace.jsonl"
    TRACE_TABLE_NAME = "trace.csv"
    REPORT_NAME = "report.csv"

    def __init__(
        self,
        scenario: ScenarioSpec,
        scenario_name: str,
        method: GrowthMethod,
        repetition: int,
        output_dir: str,
        status: RunStatus = RunStatus.PENDING,
    ):
        self.scenario = scenario
        self.scenario_name = scenario_name
        self.method = method
        self.repetition = repetition
        self.output_dir = output_dir
        self.run_id = self._deterministic_run_id()
        self._status = status
        self.error: Optional[str] = None
        self.seconds: Optional[float] = None
        self.observer: Optional[Callable[["BenchRun"], None]] = None

    def notify_observer(self) -> None:
        if self.observer:
            self.observer(self)

    @property
    def status(self) -> RunStatus:
        return self._status

    @status.setter
    def status(self, new_status: RunStatus) -> None:
        self._status = new_status
        self.notify_observer()

    @property
    def n(self) -> int:
        return self.scenario.n

    @property
    def seed(self) -> int:
        return self.scenario.seed

    def _deterministic_run_id(self) -> uuid.UUID:
        key = json.dumps(
            {
                "scenario": json.loads(self.scenario.json()),
                "scenario_name": self.scenario_name,
                "method": self.method.value,
                "repetition": self.repetition,
            },
            sort_keys=True,
        )
        return uuid.uuid5(RUN_NAMESPACE, key)

    @property
    def scenario_dir(self) -> str:
        return os.path.join(self.output_dir, self.scenario_name)

    @property
    def truth_dir(self) -> str:
        return os.path.join(self.scenario_dir, "truth")

    @property
    def group_dir(self) -> str:
        """Directory shared by all repetitions of this method at this sample size."""
        return os.path.join(self.scenario_dir, f"n{self.n}", self.method.value)

    @property
    def run_dir(self) -> str:
        return os.path.join(self.group_dir, f"rep{self.repetition:03d}")

    @property
    def trace_path(self) -> str:
        return os.path.join(self.run_dir, BenchRun.TRACE_NAME)

    @property
    def report_path(self) -> str:
        return os.path.join(self.run_dir, BenchRun.REPORT_NAME)

    def outputs_exist(self) -> bool:
        return os.path.exists(self.trace_path) and os.path.exists(self.report_path)

    def to_partial_json(self) -> Dict[str, Any]:
        """Returns the manifest record of the run."""
        return {
            "run_id": str(self.run_id),
            "scenario": self.scenario_name,
            "n": self.n,
            "method": self.method.value,
            "repetition": self.repetition,
            "seeds": {"data": self.seed, "sampling": [self.seed, self.repetition]},
            "status": self.status.value,
            "seconds": self.seconds,
            "error": self.error,
            "run_dir": os.path.relpath(self.run_dir, self.output_dir),
        }

    def __str__(self):
        return f"BenchRun {self.run_id} ({self.status.value})"
