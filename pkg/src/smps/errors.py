"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A requested dense object exceeds the configured size guard."""


class StructureError(ValueError):
    """Tensor shapes or entries violate a structural requirement."""


class NotNormalizedError(ValueError):
    """The operation requires an L1-normalized input."""


class InconsistencyError(ValueError):
    """Candidate representations disagree about the distribution."""


class DegenerateInputError(ValueError):
    """All probability mass was pruned; nothing is left to decompose."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach the target residual."""
