"""Exception hierarchy shared by the qbouncer modules."""


class BouncerError(Exception):
    """Base class for all qbouncer failures."""


class DomainError(BouncerError, ValueError):
    """An argument lies outside the domain of a function."""


class TruncationError(BouncerError):
    """The truncated eigenbasis misses too much of the initial state."""


class ConsistencyError(BouncerError):
    """Two independent evaluations of the same quantity disagree."""


class GridError(BouncerError):
    """The spatial grid cannot hold the wave packet."""


class AliasingError(BouncerError):
    """The discrete momentum spectrum is not resolved by the grid."""


class BoundViolation(BouncerError):
    """An uncertainty relation fails beyond numerical tolerance."""


class ConfigError(BouncerError, ValueError):
    """A scenario document is malformed or inconsistent."""
