"""Shared exception types."""


class ConfigError(ValueError):
    """Raised when a run configuration or input file is malformed."""


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration outgrows its word / sample budget.

    Carries whatever partial result was assembled so callers can report
    progress instead of discarding work.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
