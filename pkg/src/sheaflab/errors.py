"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed input: bad file, shape mismatch, failed precondition."""


class BudgetExceeded(RuntimeError):
    """An exhaustive search or randomized construction ran out of budget."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
