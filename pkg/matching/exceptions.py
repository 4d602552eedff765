"""Errors raised by the matching toolkit.

Every error derives from ``MatchingError`` (a ``ValueError``) so callers that
only care about "bad input or unsolvable instance" can catch one type.
"""


class MatchingError(ValueError):
    """Base class for all matching toolkit errors."""


class InvalidGraphError(MatchingError):
    """The instance is malformed: bad index, duplicate edge, bad file."""


class InvalidParameterError(MatchingError):
    """A generator, solver or reduction parameter is out of range."""


class InvalidMatchingError(MatchingError):
    """A matching (or the flow inducing it) breaks a required invariant."""


class InfeasibleInstanceError(MatchingError):
    """No matching covering every right vertex exists."""


class IterationLimitError(MatchingError):
    """The auction/refine iteration cap fired before the phase finished."""


class SolveTimeoutError(MatchingError):
    """A solve ran past its deadline."""


class InstanceTooLargeError(MatchingError):
    """The instance is beyond the brute-force enumeration bound."""


class WeightMismatchError(MatchingError):
    """Two solvers returned different optimum weights for one instance."""


class InvariantViolationError(MatchingError):
    """A solver invariant check failed while invariant checking was on."""
