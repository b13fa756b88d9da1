"""Errors shared across modules."""


class PstError(Exception):
    """Base class for all library errors."""


class CapExceeded(PstError):
    """A combinatorial budget was exceeded; the caller must shrink the
    request or switch to an explicit sampling policy."""
