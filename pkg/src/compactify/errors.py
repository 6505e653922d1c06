class CompactifyError(Exception):
    """Base class for all errors raised by this package."""


class UnsupportedExpression(CompactifyError):
    """A set expression falls outside what a map or space can decide exactly."""


class PreconditionError(CompactifyError, ValueError):
    pass


class InconclusiveError(CompactifyError):
    """An enumeration did not stabilise within its bound."""


class InvalidTarget(CompactifyError, ValueError):
    pass


class CodomainMismatch(CompactifyError, ValueError):
    pass


class ConsistencyError(CompactifyError):
    """An internal invariant failed; indicates a bug or an unsound model."""
