"""Exception hierarchy shared by every module.

Two families matter to callers: ``DomainError`` means the inputs were bad
(out-of-range arguments, malformed files, dimension mismatches) and
``PreconditionError`` means the inputs were well formed but violate a
mathematical hypothesis (rank deficiency, non-orthogonal columns). The
command line maps the first family to exit code 1 and the second to 2.
"""


class NoisyQrError(Exception):
    """Base class for all package errors."""


class DomainError(NoisyQrError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class MatrixFormatError(DomainError):
    """A matrix file does not follow the rows,cols CSV layout."""


class PreconditionError(NoisyQrError):
    """A hypothesis required by the operation does not hold."""


class RankDeficiencyError(PreconditionError):
    """The matrix is numerically rank deficient (sigma_min <= tol * sigma_max)."""


class ConvergenceError(NoisyQrError, RuntimeError):
    """An iterative evaluation hit its iteration cap before converging."""
