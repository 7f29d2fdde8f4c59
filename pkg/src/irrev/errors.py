"""Shared exception types with a stable CLI exit-code mapping."""


class DegenerateInputError(ValueError):
    """Input is structurally valid but the requested quantity is undefined on it."""


class ResourceLimitError(RuntimeError):
    """A construction or search would exceed a configured size limit."""


class BudgetExceededError(RuntimeError):
    """Iteration budget exhausted before reaching the requested tolerance.

    Carries the best result found so far in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
