"""Exception hierarchy shared by all restframe modules."""


class RestframeError(Exception):
    """Base class for all library errors."""


class ValidationError(RestframeError):
    """Malformed or inconsistent input (bad config, non-finite data, ...)."""


class DomainError(RestframeError):
    """A mathematically inadmissible point was reached (negative radicand, ...)."""


class NumericalError(RestframeError):
    """An iterative numerical procedure failed (Newton divergence, eigensolver, ...)."""


class RelativisticNonSeparability(RestframeError):
    """Raised when a single-particle subsystem is requested from a rest-frame state.

    After the rest-frame conditions are imposed, only the frozen collective
    data and the relative variables remain; particle subsystems exist only in
    the un-physical description that precedes those conditions.  Tracing out
    one particle therefore has no defined result and this error is the
    operation's contract.
    """
