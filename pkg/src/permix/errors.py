"""Exception types shared across the package."""


class CapExceeded(ValueError):
    """A size cap was exceeded (enumeration cap, permanent cap, ...)."""


class BudgetExceeded(RuntimeError):
    """An exact computation would exceed the configured compute budget."""


class RejectionRateError(RuntimeError):
    """A rejection sampler's acceptance rate fell below the usable floor."""
