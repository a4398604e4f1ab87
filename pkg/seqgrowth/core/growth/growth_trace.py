import json
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import jsonschema
import networkx as nx
import pandas as pd

from seqgrowth.core.base.errors import DataFormatError
from seqgrowth.core.matrix.sym_matrix import Edge, Support

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TRACE_COLUMNS = ["k", "i", "j", "loss", "inner_iters", "score"]

STEP_SCHEMA = {
    "type": "object",
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "i": {"type": "integer", "minimum": 0},
        "j": {"type": "integer", "minimum": 1},
        "loss": {"type": ["number", "null"]},
        "inner_iters": {"type": "integer", "minimum": 0},
        "score": {"type": "number"},
    },
    "required": TRACE_COLUMNS,
    "additionalProperties": False,
}

META_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "method": {"type": "string"},
        "d": {"type": "integer", "minimum": 1},
        "k_max": {"type": "integer", "minimum": 0},
        "seed": {"type": ["integer", "null"]},
    },
    "required": ["schema_version", "method", "d", "k_max"],
}


class GrowthMethod(Enum):
    """
    GrowthMethod: Enum of graph growth procedures.
    GSL, BBI and BFCI are information-driven growths; PREC and PCORR are the naive orderings by
    precision and partial-correlation magnitude.
    """

    GSL = "gsl"
    BBI = "bbi"
    BFCI = "bfci"
    PREC = "prec"
    PCORR = "pcorr"

    @property
    def is_naive(self) -> bool:
        return self in (GrowthMethod.PREC, GrowthMethod.PCORR)


@dataclass(frozen=True)
class GrowthStep:
    k: int
    edge: Edge
    loss_after: Optional[float]
    inner_iterations: int
    selection_score: float

    def to_record(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "i": self.edge[0],
            "j": self.edge[1],
            "loss": self.loss_after,
            "inner_iters": self.inner_iterations,
            "score": self.selection_score,
        }


@dataclass
class GrowthTrace:
    """
    The sequence of edges activated by a growth, with the loss after each activation.

    Args:
        method (GrowthMethod): The procedure that produced the trace.
        d (int): Dimension of the problem.
        seed (Optional[int]): Seed of the tie-break stream (naive orderings only).
        initial_loss (Optional[float]): Loss of the edgeless graph, when known.
    """

    method: GrowthMethod
    d: int
    seed: Optional[int] = None
    initial_loss: Optional[float] = None
    steps: List[GrowthStep] = field(default_factory=list)

    @property
    def k_max(self) -> int:
        return len(self.steps)

    @property
    def max_edges(self) -> int:
        return self.d * (self.d - 1) // 2

    def append(
        self, edge: Edge, loss_after: Optional[float], inner_iterations: int, score: float
    ) -> GrowthStep:
        step = GrowthStep(self.k_max + 1, edge, loss_after, inner_iterations, score)
        self.steps.append(step)
        return step

    def edges(self, k: Optional[int] = None) -> List[Edge]:
        """The first `k` activated edges (all of them by default)."""
        steps = self.steps if k is None else self.steps[:k]
        return [step.edge for step in steps]

    def losses(self) -> List[Optional[float]]:
        return [step.loss_after for step in self.steps]

    def support(self, k: Optional[int] = None) -> Support:
        return Support(self.d, tuple(self.edges(k)))

    def to_graph(self, k: Optional[int] = None) -> nx.Graph:
        """The graph of the first `k` edges; edge attribute ``rank`` is the activation step."""
        return self.support(k).to_graph()

    def total_inner_iterations(self) -> int:
        return sum(step.inner_iterations for step in self.steps)

    def loss_increases(self, tolerance: float = 1e-12) -> List[int]:
        """Steps whose loss exceeds the previous recorded loss by more than `tolerance`."""
        increases = []
        previous = self.initial_loss
        for step in self.steps:
            if step.loss_after is None:
                continue
            if previous is not None and step.loss_after > previous + tolerance:
                increases.append(step.k)
            previous = step.loss_after
        return increases

    def meta(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "method": self.method.value,
            "d": self.d,
            "k_max": self.k_max,
            "seed": self.seed,
            "initial_loss": self.initial_loss,
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([step.to_record() for step in self.steps], columns=TRACE_COLUMNS)

    def to_jsonl(self, path: str) -> None:
        """Writes one JSON record per step plus a ``<stem>.meta.json`` sidecar."""
        with open(path, "w") as file:
            for step in self.steps:
                file.write(json.dumps(step.to_record()) + "\n")
        with open(meta_path(path), "w") as file:
            json.dump(self.meta(), file, indent=2, sort_keys=True)

    def to_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    @classmethod
    def from_jsonl(cls, path: str) -> "GrowthTrace":
        """
        Reads a trace written by `to_jsonl`.

        Raises:
            DataFormatError: If the trace or its metadata sidecar is malformed.
        """
        try:
            with open(meta_path(path), "r") as file:
                meta = json.load(file)
            jsonschema.validate(meta, META_SCHEMA)
            trace = cls(
                GrowthMethod(meta["method"]),
                meta["d"],
                seed=meta.get("seed"),
                initial_loss=meta.get("initial_loss"),
            )
            with open(path, "r") as file:
                for line_number, line in enumerate(file, start=1):
                    if not line.strip():
                        continue
                    record = json.loads(line)
                    jsonschema.validate(record, STEP_SCHEMA)
                    if record["k"] != trace.k_max + 1:
                        raise DataFormatError(
                            f"{path}:{line_number}: expected step {trace.k_max + 1}, "
                            f"got {record['k']}"
                        )
                    trace.append(
                        (record["i"], record["j"]),
                        record["loss"],
                        record["inner_iters"],
                        record["score"],
                    )
        except (json.JSONDecodeError, jsonschema.ValidationError, ValueError) as e:
            raise DataFormatError(f"malformed trace {path}: {e}") from e
        # validates edges are distinct upper pairs of the dimension
        try:
            trace.support()
        except ValueError as e:
            raise DataFormatError(f"malformed trace {path}: {e}") from e
        return trace


def meta_path(trace_path: str) -> str:
    stem, _ = os.path.splitext(trace_path)
    return f"{stem}.meta.json"
