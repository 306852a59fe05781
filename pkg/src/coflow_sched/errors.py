"""Exception types shared across the package."""


class CoflowError(Exception):
    """Base class for errors raised by this package."""


class ModelSizeError(CoflowError):
    """An LP model would exceed the configured variable-count cap."""


class SolverError(CoflowError):
    """The LP solver failed ("infeasible", "iteration limit", ...)."""


class OracleSizeError(CoflowError):
    """The instance is too large for exhaustive enumeration."""
