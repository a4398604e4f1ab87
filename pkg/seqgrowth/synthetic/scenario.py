"""
Synthetic ground truths with a known sparsity pattern.

A base matrix A with a random, clique or hub pattern is shifted on its diagonal to become
positive semidefinite (B = A + diag(d*)), regularised by M = B + ηI and turned into a unit-diagonal
covariance Σ = corr(M⁻¹). The matching precision is Θ = D^{1/2} M D^{1/2} with D = diag(M⁻¹), so
Θ carries exactly the off-diagonal pattern of A.
"""
import json
import logging
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Union

import networkx as nx
import numpy as np
import pandas as pd
import scipy.linalg
from pydantic import BaseModel, root_validator, validator

from seqgrowth.configs.config_enums import ConfigCategory, ScenarioConfigName
from seqgrowth.core.base.errors import InfeasiblePatternError, NotPositiveDefiniteError
from seqgrowth.core.matrix.matrix_io import read_matrix, write_matrix
from seqgrowth.core.matrix.sym_matrix import (
    Edge,
    MatrixLike,
    Support,
    SymMatrix,
    as_array,
    is_positive_definite,
    partial_correlations,
    spd_inverse,
)
from seqgrowth.core.utils import SeedDomain, load_config, make_rng

logger = logging.getLogger(__name__)

__all__ = [
    "GraphFamily",
    "ScenarioSpec",
    "GroundTruth",
    "generate_base",
    "psd_shift",
    "build_truth",
    "load_external",
    "partial_correlations",
]

GROUP_COUNT = 5
EDGE_THRESHOLD = 1.0e-12
FEASIBILITY_TOLERANCE = 1.0e-10


class GraphFamily(Enum):
    RANDOM = "random"
    CLIQUE = "clique"
    HUB = "hub"
    EXTERNAL = "external"


class ScenarioSpec(BaseModel):
    """
    Args:
        family (GraphFamily): Pattern of the true graph.
        d (int): Dimension.
        m (Optional[int]): Number of true edges (RANDOM only).
        eta (float): Signal parameter η > 0; larger values weaken the conditional dependencies.
        n (int): Sample size.
        seed (int): Seed of the data-generation and sampling streams.
        external_path (Optional[str]): Matrix file used as M (EXTERNAL only).
        block_offset (int): First index of the diagonal block read from `external_path`.
        block_size (Optional[int]): Size of that block; the whole matrix by default.
    """

    class Config:
        extra = "forbid"

    family: GraphFamily
    d: int = 50
    m: Optional[int] = None
    eta: float = 0.25
    n: int = 100
    seed: int = 0
    external_path: Optional[str] = None
    block_offset: int = 0
    block_size: Optional[int] = None

    @validator("d", "n")
    def _positive(cls, value, field):
        if value < 1:
            raise ValueError(f"{field.name} must be positive, but got {value}")
        return value

    @validator("eta")
    def _positive_eta(cls, value):
        if not value > 0:
            raise ValueError(f"eta must be positive, but got {value}")
        return value

    @root_validator(skip_on_failure=True)
    def _family_fields(cls, values):
        family, d, m = values["family"], values["d"], values.get("m")
        max_edges = d * (d - 1) // 2
        if family == GraphFamily.RANDOM:
            if m is None:
                raise ValueError("the random family requires m")
            if not 0 <= m <= max_edges:
                raise ValueError(f"m must be in [0, {max_edges}] for d={d}, but got {m}")
        if family == GraphFamily.EXTERNAL and not values.get("external_path"):
            raise ValueError("the external family requires external_path")
        if values.get("block_offset", 0) < 0:
            raise ValueError("block_offset must be non-negative")
        return values

    @classmethod
    def load(cls, config_name: Union[ScenarioConfigName, str], **overrides) -> "ScenarioSpec":
        """Loads a named scenario preset, applying `overrides` on top."""
        config_name = ScenarioConfigName(config_name)
        loaded_yaml = load_config(ConfigCategory.SCENARIO.value, config_name.value)
        loaded_yaml.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**loaded_yaml)


@dataclass
class GroundTruth:
    sigma: SymMatrix
    theta: SymMatrix
    true_edges: Support

    @property
    def dim(self) -> int:
        return self.sigma.dim

    def write(self, directory: str) -> None:
        """Writes sigma.csv, theta.csv and edges.csv (one ``i,j`` line per true edge)."""
        os.makedirs(directory, exist_ok=True)
        write_matrix(os.path.join(directory, "sigma.csv"), self.sigma)
        write_matrix(os.path.join(directory, "theta.csv"), self.theta)
        write_edges(os.path.join(directory, "edges.csv"), self.true_edges.edges)

    @classmethod
    def read(cls, directory: str) -> "GroundTruth":
        sigma = read_matrix(os.path.join(directory, "sigma.csv"))
        theta = read_matrix(os.path.join(directory, "theta.csv"))
        edges = read_edges(os.path.join(directory, "edges.csv"))
        return cls(sigma, theta, Support(sigma.dim, tuple(edges)))


def write_edges(path: str, edges) -> None:
    with open(path, "w") as file:
        file.write("i,j\n")
        for i, j in edges:
            file.write(f"{i},{j}\n")


def read_edges(path: str) -> List[Edge]:
    frame = pd.read_csv(path)
    return [(int(i), int(j)) for i, j in zip(frame["i"], frame["j"])]


def sparsity_pattern(spec: ScenarioSpec, rng: np.random.Generator) -> List[Edge]:
    """
    Returns the true edge list, sorted lexicographically.

    Raises:
        InfeasiblePatternError: If the family cannot be realised at dimension d.
    """
    d = spec.d
    if spec.family == GraphFamily.RANDOM:
        pairs = Support.upper_pairs(d)
        if spec.m > len(pairs):
            raise InfeasiblePatternError(f"cannot place {spec.m} edges on {d} nodes")
        chosen = rng.choice(len(pairs), size=spec.m, replace=False)
        return sorted(pairs[k] for k in chosen)

    if spec.family in (GraphFamily.CLIQUE, GraphFamily.HUB):
        if d < 2 * GROUP_COUNT:
            raise InfeasiblePatternError(
                f"{spec.family.value} needs at least {2 * GROUP_COUNT} nodes, got d={d}"
            )
        graph = nx.Graph()
        for group in np.array_split(np.arange(d), GROUP_COUNT):
            nodes = group.tolist()
            if spec.family == GraphFamily.CLIQUE:
                graph.add_edges_from(nx.complete_graph(nodes).edges)
            else:
                # the first node of each group is its hub
                graph.add_edges_from(nx.star_graph(nodes).edges)
        return sorted((min(i, j), max(i, j)) for i, j in graph.edges)

    raise InfeasiblePatternError(f"{spec.family.value} has no generated pattern")


def generate_base(spec: ScenarioSpec) -> SymMatrix:
    """
    Returns A: zero diagonal, and on the pattern i.i.d. values R·U with R a Rademacher sign and
    U ~ Uniform[0.5, 1.5].
    """
    rng = make_rng(spec.seed, SeedDomain.DATA_GENERATION)
    edges = sparsity_pattern(spec, rng)
    signs = 2.0 * rng.integers(0, 2, size=len(edges)) - 1.0
    magnitudes = rng.uniform(0.5, 1.5, size=len(edges))
    base = np.zeros((spec.d, spec.d))
    if edges:
        rows, cols = np.array(edges).T
        base[rows, cols] = signs * magnitudes
        base[cols, rows] = signs * magnitudes
    return SymMatrix(base)


def _smallest_eigenpair(matrix: np.ndarray):
    values, vectors = scipy.linalg.eigh(matrix, subset_by_index=[0, 0])
    return float(values[0]), vectors[:, 0]


def psd_shift(a: MatrixLike, max_iterations: int = 200) -> np.ndarray:
    """
    Approximately solves min Σᵢ dᵢ subject to A + diag(d) ⪰ 0, d ≥ 0.

    Starts from the uniform shift dᵢ = max(0, −λ_min(A)) and runs a projected subgradient scheme
    that alternates a Polyak feasibility step along v∘v (v the eigenvector of the smallest
    eigenvalue) when the constraint is violated with a decreasing step on the objective when it is
    met. The best certified feasible point (λ_min ≥ −1e-10) is returned, which is never worse than
    the uniform shift.
    """
    a_arr = as_array(a, what="A")
    d = a_arr.shape[0]
    lambda_min, _ = _smallest_eigenpair(a_arr)
    if lambda_min >= 0:
        return np.zeros(d)

    best = np.full(d, -lambda_min)
    best_objective = uniform = float(best.sum())
    shift = best.copy()
    base_step = -lambda_min / math.sqrt(d)
    objective_steps = 0
    for _ in range(max_iterations):
        lambda_min, vector = _smallest_eigenpair(a_arr + np.diag(shift))
        if lambda_min >= -FEASIBILITY_TOLERANCE:
            if shift.sum() < best_objective:
                best, best_objective = shift.copy(), float(shift.sum())
            objective_steps += 1
            shift = np.maximum(shift - base_step / math.sqrt(objective_steps), 0.0)
        else:
            direction = vector * vector
            step = -lambda_min / float(direction @ direction)
            shift = np.maximum(shift + step * direction, 0.0)
    logger.debug("PSD shift objective %.6g (uniform shift %.6g)", best_objective, uniform)
    return best


def edges_of(theta: MatrixLike, threshold: float = EDGE_THRESHOLD) -> Support:
    array = as_array(theta, what="precision")
    rows, cols = np.triu_indices(array.shape[0], k=1)
    mask = np.abs(array[rows, cols]) > threshold
    return Support(array.shape[0], tuple(zip(rows[mask].tolist(), cols[mask].tolist())))


def _normalise(m: np.ndarray):
    covariance = spd_inverse(m, what="M")
    scale = np.sqrt(np.diag(covariance))
    sigma = covariance / np.outer(scale, scale)
    np.fill_diagonal(sigma, 1.0)
    theta = m * np.outer(scale, scale)
    return SymMatrix(sigma), SymMatrix(theta)


def build_truth(spec: ScenarioSpec) -> GroundTruth:
    """Builds (Σ, Θ, true edges) from a generated base matrix."""
    if spec.family == GraphFamily.EXTERNAL:
        return load_external(spec.external_path, spec.block_offset, spec.block_size)
    base = generate_base(spec)
    shift = psd_shift(base)
    m = base.entries + np.diag(shift) + spec.eta * np.eye(spec.d)
    sigma, theta = _normalise(m)
    true_edges = edges_of(base)
    logger.info(
        "Built %s scenario with d=%d and %d true edge(s)",
        spec.family.value,
        spec.d,
        len(true_edges),
    )
    return GroundTruth(sigma, theta, true_edges)


def load_external(
    path: str, block_offset: int = 0, block_size: Optional[int] = None
) -> GroundTruth:
    """
    Uses an SPD matrix file (or one of its diagonal blocks) as M and normalises it like a
    generated scenario.

    Raises:
        MatrixFormatError: If the file is malformed.
        NotPositiveDefiniteError: If the matrix is not SPD.
    """
    matrix = read_matrix(path)
    if block_offset or block_size is not None:
        size = block_size if block_size is not None else matrix.dim - block_offset
        matrix = matrix.block(block_offset, size)
    if not is_positive_definite(matrix):
        raise NotPositiveDefiniteError(path, "the external matrix must be SPD")
    sigma, theta = _normalise(np.array(matrix.entries))
    return GroundTruth(sigma, theta, edges_of(theta))


def scenario_document(spec: ScenarioSpec) -> str:
    return json.dumps(json.loads(spec.json()), indent=2, sort_keys=True)
