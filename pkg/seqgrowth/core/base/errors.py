from typing import TYPE_CHECKING, Optional, Tuple

if TYPE_CHECKING:
    from seqgrowth.core.growth.growth_trace import GrowthTrace


class SeqGrowthError(Exception):
    """Root of every error raised by the library."""


class ComputeError(SeqGrowthError):
    """A numerical routine could not produce a valid result."""


class DimensionMismatchError(ComputeError):
    def __init__(self, expected: int, actual: int, what: str = "matrix"):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what} has dimension {actual}, expected {expected}")


class NotPositiveDefiniteError(ComputeError):
    def __init__(self, what: str = "matrix", reason: str = ""):
        message = f"{what} is not numerically positive-definite"
        if reason:
            message += f" ({reason})"
        super().__init__(message)


class DegenerateBlockError(ComputeError):
    """Raised when a {1,2}-update meets a non-positive pivot or a singular 2x2 block."""

    def __init__(self, index: Tuple[int, ...], reason: str):
        self.index = index
        super().__init__(f"degenerate block at {index}: {reason}")


class InconsistentSupportError(ComputeError):
    def __init__(self, edges):
        self.edges = sorted(edges)
        preview = ", ".join(str(e) for e in self.edges[:5])
        super().__init__(f"iterate has {len(self.edges)} edge(s) outside the support: {preview}")


class EmptyCandidateSetError(ComputeError):
    def __init__(self, what: str = "candidate set"):
        super().__init__(f"{what} is empty")


class InfeasiblePatternError(ComputeError):
    """The requested sparsity pattern cannot be realised for the given dimension."""


class DegenerateInputError(ComputeError):
    """The input carries no usable information (e.g. an all-zero covariance)."""


class DataFormatError(SeqGrowthError):
    """A file could not be parsed into the expected structure."""


class MatrixFormatError(DataFormatError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"malformed matrix file {path}: {reason}")


class GrowthAbortedError(ComputeError):
    """An inner failure stopped a growth; the steps completed so far are kept."""

    def __init__(self, partial_trace: "GrowthTrace", cause: Optional[BaseException] = None):
        self.partial_trace = partial_trace
        self.cause = cause
        super().__init__(
            f"growth aborted after {partial_trace.k_max} step(s)"
            + (f": {cause}" if cause is not None else "")
        )
