"""Exception hierarchy shared across the package.

Each class maps to one CLI exit code (see ``cli.EXIT_CODES``), so new error
types should subclass one of these rather than raising bare ValueErrors from
user-facing entry points.
"""


class TransferItrError(Exception):
    """Base class for all package errors."""


class DataValidationError(TransferItrError):
    """Malformed input data: bad schema, missing values, dimension mismatch."""


class ConvergenceError(TransferItrError):
    """An iterative solver failed to reach its tolerance."""


class SeparationError(ConvergenceError):
    """Logistic likelihood has no finite maximizer (separated data)."""


class RankDeficiencyError(TransferItrError):
    """Weighted design matrix is rank deficient."""

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class InfeasibleConstraintsError(TransferItrError):
    """Balance constraints admit no weight vector (entropy dual diverges)."""

    def __init__(self, message, worst_constraint=None):
        super().__init__(message)
        self.worst_constraint = worst_constraint
