class UsageError(ValueError):
    """Invalid input: bad shape, out-of-window degree, unparsable text."""


class InternalError(RuntimeError):
    """A state that the algebra says cannot occur."""


class BudgetExceeded(RuntimeError):
    """A computation would exceed the configured size budget."""
