import json
import logging
import os
from typing import Any, Dict, List, Optional

from seqgrowth import __version__
from seqgrowth.core.growth.growth_trace import SCHEMA_VERSION
from seqgrowth.core.tasks.bench_task import BenchRun, RunStatus

logger = logging.getLogger(__name__)


class BenchRunRegistry:
    """
    Keeps the status of every bench run in `manifest.json`.

    The manifest also stores the library version and the resolved run configuration, which,
    together with the per-run seeds, is what is needed to reproduce the output directory.
    """

    MANIFEST_NAME = "manifest.json"

    def __init__(
        self, output_dir: str, config: Optional[Dict[str, Any]] = None, resume: bool = False
    ):
        self.output_dir = output_dir
        self.manifest_path = os.path.join(output_dir, BenchRunRegistry.MANIFEST_NAME)
        self.records: Dict[str, Dict[str, Any]] = {}
        self.config = config or {}
        if resume and os.path.exists(self.manifest_path):
            self._load()

    def _load(self) -> None:
        with open(self.manifest_path, "r") as file:
            manifest = json.load(file)
        self.records = {record["run_id"]: record for record in manifest.get("runs", [])}
        logger.debug("Loaded %d run record(s) from %s", len(self.records), self.manifest_path)

    def initialize_run(self, run: BenchRun) -> None:
        """Attaches the registry to `run`; a record loaded from the manifest is kept."""
        run.observer = self.update_run
        self.records.setdefault(str(run.run_id), run.to_partial_json())

    def update_run(self, run: BenchRun) -> None:
        self.records[str(run.run_id)] = run.to_partial_json()
        self.write()

    def get_status(self, run: BenchRun) -> Optional[RunStatus]:
        record = self.records.get(str(run.run_id))
        return RunStatus(record["status"]) if record else None

    def is_complete(self, run: BenchRun) -> bool:
        """True if the manifest records a success and the run's files are on disk."""
        return self.get_status(run) == RunStatus.SUCCESS and run.outputs_exist()

    def runs_with_status(self, status: RunStatus) -> List[Dict[str, Any]]:
        return [record for record in self.records.values() if record["status"] == status.value]

    def write(self) -> None:
        os.makedirs(self.output_dir, exist_ok=True)
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "library_version": __version__,
            "config": self.config,
            "runs": sorted(
                self.records.values(),
                key=lambda r: (r["scenario"], r["n"], r["method"], r["repetition"]),
            ),
        }
        partial_path = f"{self.manifest_path}.partial"
        with open(partial_path, "w") as file:
            json.dump(manifest, file, indent=2)
        os.replace(partial_path, self.manifest_path)
