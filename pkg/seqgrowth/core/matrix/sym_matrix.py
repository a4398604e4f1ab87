"""
Dense symmetric matrices, SPD iterate/inverse pairs and graph supports.

Indices are 0-based: an edge is a pair ``(i, j)`` with ``0 <= i < j < d``.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import scipy.linalg

from seqgrowth.core.base.errors import (
    DimensionMismatchError,
    InconsistentSupportError,
    NotPositiveDefiniteError,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class SymMatrix:
    """
    An immutable dense symmetric matrix.

    Construction symmetrises the input by averaging it with its transpose, so
    ``entries[i, j] == entries[j, i]`` holds exactly.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Union[np.ndarray, Sequence[Sequence[float]]]):
        array = np.array(entries, dtype=float)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise DimensionMismatchError(
                expected=array.shape[0] if array.ndim == 2 else 0,
                actual=array.shape[1] if array.ndim == 2 else array.ndim,
                what="square matrix",
            )
        array = 0.5 * (array + array.T)
        array.setflags(write=False)
        self._entries = array

    @classmethod
    def from_array(cls, array: Union[np.ndarray, Sequence[Sequence[float]]]) -> "SymMatrix":
        return cls(array)

    @classmethod
    def identity(cls, dim: int) -> "SymMatrix":
        return cls(np.eye(dim))

    @classmethod
    def diag(cls, values: Sequence[float]) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def entries(self) -> np.ndarray:
        """Read-only view of the underlying array."""
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def block(self, offset: int, size: int) -> "SymMatrix":
        """Returns the principal block ``[offset:offset+size, offset:offset+size]``."""
        if offset < 0 or size < 1 or offset + size > self.dim:
            raise DimensionMismatchError(self.dim, offset + size, what="diagonal block end")
        return SymMatrix(self._entries[offset : offset + size, offset : offset + size])

    def __array__(self, dtype=None) -> np.ndarray:
        return self._entries if dtype is None else self._entries.astype(dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return bool(np.array_equal(self._entries, other._entries))

    def __repr__(self) -> str:
        return f"SymMatrix(dim={self.dim})"


MatrixLike = Union[SymMatrix, np.ndarray]


def as_array(matrix: MatrixLike, dim: Optional[int] = None, what: str = "matrix") -> np.ndarray:
    """Returns the float array behind `matrix`, checking it is square (and of size `dim`)."""
    array = matrix.entries if isinstance(matrix, SymMatrix) else np.asarray(matrix, dtype=float)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise DimensionMismatchError(array.shape[0], array.shape[-1], what=f"{what} (not square)")
    if dim is not None and array.shape[0] != dim:
        raise DimensionMismatchError(dim, array.shape[0], what=what)
    return array


def cholesky_logdet(matrix: MatrixLike, what: str = "matrix") -> float:
    """
    Returns log det of an SPD matrix from its Cholesky factor.

    A failed factorisation is the library's positive-definiteness test.

    Raises:
        NotPositiveDefiniteError: If the factorisation fails.
    """
    array = as_array(matrix, what=what)
    try:
        factor = scipy.linalg.cholesky(array, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NotPositiveDefiniteError(what, str(e)) from e
    return float(2.0 * np.sum(np.log(np.diag(factor))))


def is_positive_definite(matrix: MatrixLike) -> bool:
    try:
        cholesky_logdet(matrix)
    except NotPositiveDefiniteError:
        return False
    return True


def spd_inverse(matrix: MatrixLike, what: str = "matrix") -> np.ndarray:
    """
    Inverts an SPD matrix through its Cholesky factorisation; the result is symmetrised.

    Raises:
        NotPositiveDefiniteError: If the factorisation fails.
    """
    array = as_array(matrix, what=what)
    try:
        factor = scipy.linalg.cho_factor(array, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NotPositiveDefiniteError(what, str(e)) from e
    inverse = scipy.linalg.cho_solve(factor, np.eye(array.shape[0]))
    return 0.5 * (inverse + inverse.T)


@dataclass(frozen=True)
class Support:
    """
    A graph support: the implicit diagonal set plus an ordered list of activated edges.

    Args:
        dim (int): Number of nodes d.
        edges (Tuple[Edge, ...]): Upper-diagonal pairs in activation order.
    """

    dim: int
    edges: Tuple[Edge, ...] = ()
    _edge_set: FrozenSet[Edge] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, but got {self.dim}")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not 0 <= i < j < self.dim:
                raise ValueError(f"edge {(i, j)} is not an upper pair of a {self.dim}-node graph")
        edge_set = frozenset(edges)
        if len(edge_set) != len(edges):
            raise ValueError("support edges must be unique")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_edge_set", edge_set)

    @staticmethod
    def upper_pairs(dim: int) -> List[Edge]:
        """All upper-diagonal pairs of a `dim`-node graph in lexicographic order."""
        return list(combinations(range(dim), 2))

    @property
    def edge_set(self) -> FrozenSet[Edge]:
        return self._edge_set

    def free_edges(self) -> List[Edge]:
        """The inactive upper pairs, lexicographically ordered."""
        return [edge for edge in Support.upper_pairs(self.dim) if edge not in self._edge_set]

    def with_edge(self, edge: Edge) -> "Support":
        return Support(self.dim, self.edges + (edge,))

    def candidate_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Row/column index arrays of D ∪ E, sorted lexicographically."""
        pairs = sorted([(i, i) for i in range(self.dim)] + list(self.edges))
        rows = np.fromiter((p[0] for p in pairs), dtype=np.intp, count=len(pairs))
        cols = np.fromiter((p[1] for p in pairs), dtype=np.intp, count=len(pairs))
        return rows, cols

    def to_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.dim))
        graph.add_edges_from((i, j, {"rank": k + 1}) for k, (i, j) in enumerate(self.edges))
        return graph

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge: object) -> bool:
        return edge in self._edge_set

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)


class SpdPair:
    """
    An SPD iterate Q together with its maintained inverse R = Q⁻¹.

    `q` and `r` are plain float arrays mutated in place by the block updates; the pair has a
    single writer. After every update the caller reports it through `record_update`, which
    applies the inverse rebuild policy: a full Cholesky rebuild of R every
    ``rebuild_every`` updates (default 5·d²), or earlier when the consistency check run every
    d updates exceeds ``rebuild_tolerance``.
    """

    def __init__(
        self,
        q: np.ndarray,
        r: np.ndarray,
        consistency_bound: Optional[float] = None,
        rebuild_tolerance: float = 1.0e-9,
        rebuild_every: Optional[int] = None,
    ):
        q = np.array(q, dtype=float)
        r = np.array(r, dtype=float)
        if q.shape != r.shape or q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise DimensionMismatchError(q.shape[0], r.shape[0], what="inverse")
        self.q = q
        self.r = r
        self.rebuild_tolerance = rebuild_tolerance
        self.rebuild_every = rebuild_every or 5 * self.dim**2
        self.updates_since_rebuild = 0
        self.rebuild_count = 0
        self.consistency_bound = (
            check_consistency(self) if consistency_bound is None else consistency_bound
        )

    @classmethod
    def from_matrix(cls, q: MatrixLike, **kwargs) -> "SpdPair":
        """Builds a pair from an SPD matrix by Cholesky inversion."""
        array = np.array(as_array(q, what="Q"), dtype=float)
        array = 0.5 * (array + array.T)
        return cls(array, spd_inverse(array, what="Q"), **kwargs)

    @classmethod
    def identity(cls, dim: int) -> "SpdPair":
        return cls(np.eye(dim), np.eye(dim), consistency_bound=0.0)

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def copy(self) -> "SpdPair":
        clone = SpdPair(
            self.q.copy(),
            self.r.copy(),
            consistency_bound=self.consistency_bound,
            rebuild_tolerance=self.rebuild_tolerance,
            rebuild_every=self.rebuild_every,
        )
        clone.updates_since_rebuild = self.updates_since_rebuild
        clone.rebuild_count = self.rebuild_count
        return clone

    def rebuild_inverse(self) -> None:
        """Recomputes R from Q by Cholesky inversion."""
        self.r = spd_inverse(self.q, what="Q")
        self.updates_since_rebuild = 0
        self.rebuild_count += 1
        self.consistency_bound = check_consistency(self)

    def record_update(self) -> None:
        self.updates_since_rebuild += 1
        if self.updates_since_rebuild >= self.rebuild_every:
            self.rebuild_inverse()
            return
        if self.updates_since_rebuild % self.dim == 0:
            drift = check_consistency(self)
            if drift > self.rebuild_tolerance:
                logger.warning(
                    "Inverse drift %.3e exceeds %.1e, rebuilding R", drift, self.rebuild_tolerance
                )
                self.rebuild_inverse()
            else:
                self.consistency_bound = max(self.consistency_bound, drift)

    def edge_set(self, threshold: float = 0.0) -> Support:
        """edge(Q): the upper pairs whose entry magnitude exceeds `threshold`."""
        rows, cols = np.triu_indices(self.dim, k=1)
        mask = np.abs(self.q[rows, cols]) > threshold
        return Support(self.dim, tuple(zip(rows[mask].tolist(), cols[mask].tolist())))

    def check_support(self, support: Support) -> None:
        """
        Raises:
            InconsistentSupportError: If Q has non-zero entries outside `support`.
        """
        outside = set(self.edge_set().edges) - support.edge_set
        if outside:
            raise InconsistentSupportError(outside)

    def __repr__(self) -> str:
        return f"SpdPair(dim={self.dim}, consistency_bound={self.consistency_bound:.2e})"


def check_consistency(pair: SpdPair) -> float:
    """Returns ‖QR − I‖_F."""
    return float(np.linalg.norm(pair.q @ pair.r - np.eye(pair.dim), ord="fro"))


def support_from_edges(dim: int, edges: Iterable[Edge]) -> Support:
    return Support(dim, tuple((min(i, j), max(i, j)) for i, j in edges))


def partial_correlations(theta: MatrixLike) -> np.ndarray:
    """Returns −Θ_ij/√(Θ_ii Θ_jj) off the diagonal and 1 on it."""
    array = as_array(theta, what="precision")
    scale = np.sqrt(np.diag(array))
    if not np.all(scale > 0):
        raise NotPositiveDefiniteError("precision", "non-positive diagonal entry")
    result = -array / np.outer(scale, scale)
    np.fill_diagonal(result, 1.0)
    return result
