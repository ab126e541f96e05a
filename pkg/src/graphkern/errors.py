"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
ComputeError -> 4.
"""


class GraphKernError(Exception):
    """Base class for all package errors."""


class ConfigError(GraphKernError):
    """Inconsistent or invalid configuration (flags, parameter combinations)."""


class DataError(GraphKernError):
    """Problems with input data (files, graphs, datasets)."""


class ComputeError(GraphKernError):
    """Failures during kernel or solver computation."""


class GraphValidationError(DataError):
    """A graph invariant is violated.

    `reason` is one of: asymmetric-edge, nonpositive-length, self-loop,
    parallel-edge, attribute-dim-mismatch, label-shape, out-of-range.
    """

    def __init__(self, reason: str, message: str):
        super().__init__(f"{reason}: {message}")
        self.reason = reason


class DataFormatError(DataError):
    """Malformed or missing dataset file; carries file and line context."""

    def __init__(self, message: str, path=None, line=None):
        ctx = ""
        if path is not None:
            ctx = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + ctx)
        self.path = path
        self.line = line


class KernelInputError(DataError):
    """Graph is missing data required by the selected node kernel,
    or feature maps from incompatible relabeling runs were mixed."""


class SizeGuardError(ComputeError):
    """A path-enumeration size guard was exceeded."""


class CountOverflowError(ComputeError):
    """Path counts left the exactly-representable integer range."""


class ZeroDiagonalError(ComputeError):
    """Gram normalization hit a non-positive self-similarity."""


class DegenerateFoldError(ComputeError):
    """A cross-validation split left a class absent from the training side."""


class ConvergenceWarning(UserWarning):
    """SMO solver stopped at the iteration cap before reaching tolerance."""
