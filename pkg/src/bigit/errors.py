"""Exception types shared across the package."""


class BigitError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(BigitError, ValueError):
    """A caller violated an operation's preconditions."""


class InfeasibleSamplingError(BigitError, RuntimeError):
    """Rejection sampling could not produce a valid state."""


class InvariantError(BigitError, RuntimeError):
    """Internal planner bookkeeping is inconsistent."""


class PgmError(BigitError, ValueError):
    """Malformed or truncated PGM image data."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset
