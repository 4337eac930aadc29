"""Exception types raised across the package."""


class BlowupError(Exception):
    """Base class for all package errors."""


class InvalidWordError(BlowupError, ValueError):
    """A word contains a letter outside 1..N."""


class LevelCapError(BlowupError, ValueError):
    """A requested level exceeds the configured cap."""


class PreconditionError(BlowupError, ValueError):
    """An operation was called outside its documented domain."""


class NotInDomainError(PreconditionError):
    """A tiling is outside the domain of amalgamation (some small tile lacks
    a unique set of partners)."""


class ConfigError(BlowupError, ValueError):
    """An IFS definition failed validation."""


class InconsistencyError(BlowupError, ValueError):
    """A numeric reconstruction did not land close enough to an integer."""
