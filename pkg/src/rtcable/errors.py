"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """Input parameters fall outside the regime an operation is defined for."""


class StructureError(RuntimeError):
    """A built matrix does not have the sparsity pattern an operation relies on."""


class ConsistencyError(RuntimeError):
    """Two independent computations of the same object disagree.

    This always indicates a bug, never bad input.
    """


class ConvergenceError(RuntimeError):
    """An iterative numeric routine hit its iteration cap."""
