"""Exception types shared across the package.

The CLI maps these to exit codes: InputError -> 2, BudgetError -> 3.
Verification failures are verdicts (data), never exceptions.
"""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad ids, domains, preconditions)."""


class BudgetError(RuntimeError):
    """An enumeration or construction would exceed the caller-supplied budget."""

    def __init__(self, message: str, estimate: int | None = None):
        super().__init__(message)
        self.estimate = estimate
