import json
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, validator

from seqgrowth.config import N_JOBS, OUTPUT_DIR
from seqgrowth.configs.config_enums import ScenarioConfigName
from seqgrowth.core.descent.descent import StoppingConfig
from seqgrowth.core.descent.selection import INNER_KINDS, SelectionKind
from seqgrowth.core.growth.growth_trace import GrowthMethod
from seqgrowth.synthetic.sampling import DEFAULT_RIDGE_RHO
from seqgrowth.synthetic.scenario import ScenarioSpec

STOPPING_FIELDS = ("alpha", "beta", "tau", "hard_cap")


class CommandName(Enum):
    GENERATE = "generate"
    GROW = "grow"
    EVALUATE = "evaluate"
    STABILITY = "stability"
    BENCH = "bench"


class RunConfig(BaseModel):
    """
    The resolved configuration of one CLI invocation.

    Args:
        command (CommandName): The command the config drives.
        scenario (Optional[ScenarioSpec]): Explicit scenario (generate, bench).
        scenario_names (List[ScenarioConfigName]): Named scenario presets (generate, bench).
        input_path (Optional[str]): Data matrix, one sample per row (grow, stability).
        matrix_path (Optional[str]): Covariance matrix used instead of data (grow).
        truth_dir (Optional[str]): Directory holding sigma.csv, theta.csv, edges.csv (evaluate).
        trace_paths (List[str]): Trace files or directories to evaluate.
        methods (List[GrowthMethod]): Growth methods to run.
        inner_rule (SelectionKind): Inner rule of the full corrections.
        stopping (StoppingConfig): Stopping rule of the full corrections.
        k_max (Optional[int]): Edges per growth; all pairs when unset.
        repetitions (int): Repetitions per scenario, sample size and method (bench).
        bfci_repetitions (int): Repetitions for BFCI, which is far more expensive (bench).
        sample_sizes (List[int]): Sample sizes swept by bench; the scenario's n when empty.
        seed (Optional[int]): Root seed of every random stream. When given it replaces the seeds
            of scenarios and presets; unset, scenarios keep their own and other streams use 0.
        output_dir (str): Where results are written.
        n_jobs (int): joblib workers.
        ridge_rho (float): Ridge factor ρ, S = Σ̂ + ρ·mean(diag Σ̂)·I.
        n_sub (int): Number of subsamples (stability).
        sub_size (Optional[int]): Subsample size; ⌊n/2⌋ when unset (stability).
        consensus_k (Optional[int]): Size of the consensus graph written by stability.
        with_losses (bool): Fill in losses of naive growths.
        resume (bool): Skip bench runs already recorded as successful.
    """

    class Config:
        extra = "forbid"

    command: CommandName
    scenario: Optional[ScenarioSpec] = None
    scenario_names: List[ScenarioConfigName] = []
    input_path: Optional[str] = None
    matrix_path: Optional[str] = None
    truth_dir: Optional[str] = None
    trace_paths: List[str] = []
    methods: List[GrowthMethod] = [GrowthMethod.GSL]
    inner_rule: SelectionKind = SelectionKind.GSL
    stopping: StoppingConfig = StoppingConfig()
    k_max: Optional[int] = None
    repetitions: int = 100
    bfci_repetitions: int = 10
    sample_sizes: List[int] = []
    seed: Optional[int] = None
    output_dir: str = OUTPUT_DIR
    n_jobs: int = N_JOBS
    ridge_rho: float = DEFAULT_RIDGE_RHO
    n_sub: int = 500
    sub_size: Optional[int] = None
    consensus_k: Optional[int] = None
    with_losses: bool = False
    resume: bool = False

    @validator("repetitions", "bfci_repetitions", "n_sub", "n_jobs")
    def _positive_count(cls, value, field):
        if field.name == "n_jobs" and value == -1:
            return value
        if value < 1:
            raise ValueError(f"{field.name} must be positive, but got {value}")
        return value

    @validator("k_max", "sub_size", "consensus_k")
    def _positive_optional(cls, value, field):
        if value is not None and value < 1:
            raise ValueError(f"{field.name} must be positive, but got {value}")
        return value

    @validator("sample_sizes", each_item=True)
    def _positive_sample_size(cls, value):
        if value < 1:
            raise ValueError(f"sample sizes must be positive, but got {value}")
        return value

    @validator("ridge_rho")
    def _positive_rho(cls, value):
        if not value > 0:
            raise ValueError(f"ridge_rho must be positive, but got {value}")
        return value

    @validator("inner_rule")
    def _inner_rule(cls, value):
        if value not in INNER_KINDS:
            raise ValueError(f"{value.value} is not an inner descent rule")
        return value

    @classmethod
    def from_file(cls, path: str, command: CommandName) -> Dict[str, Any]:
        """Reads a RunConfig document; returns its fields for merging with CLI flags."""
        with open(path, "r") as file:
            document = json.load(file)
        document.setdefault("command", command.value)
        if document["command"] != command.value:
            raise ValueError(
                f"config file is for '{document['command']}', not for '{command.value}'"
            )
        return document

    @classmethod
    def resolve(
        cls, command: CommandName, config_path: Optional[str] = None, **flags
    ) -> "RunConfig":
        """
        Builds the config of `command` from an optional file, overridden by every flag that was
        explicitly given (not None). Stopping flags are merged into `stopping`.
        """
        document: Dict[str, Any] = (
            cls.from_file(config_path, command) if config_path else {"command": command.value}
        )
        stopping = dict(document.get("stopping", {}))
        for name in STOPPING_FIELDS:
            value = flags.pop(name, None)
            if value is not None:
                stopping[name] = value
        if stopping:
            document["stopping"] = stopping
        for name, value in flags.items():
            if value is None or value == ():
                continue
            document[name] = list(value) if isinstance(value, tuple) else value
        return cls(**document)

    @property
    def root_seed(self) -> int:
        return 0 if self.seed is None else self.seed

    def repetitions_for(self, method: GrowthMethod) -> int:
        return self.bfci_repetitions if method == GrowthMethod.BFCI else self.repetitions

    def to_document(self) -> Dict[str, Any]:
        return json.loads(self.json())
