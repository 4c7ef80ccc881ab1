"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures to distinct process exit statuses.
"""


class NeumannLabError(Exception):
    exit_code = 10


class ParseError(NeumannLabError, ValueError):
    exit_code = 3


class SequenceExhausted(NeumannLabError, IndexError):
    """A window beyond the materialized prefix was needed and no rule extends it."""

    exit_code = 4


class EnumerationRefused(NeumannLabError):
    """A full enumeration would exceed the configured cap."""

    exit_code = 5


class WindowTooSmall(NeumannLabError, ValueError):
    """A permutation's support escapes the sampled coloring window."""

    exit_code = 6


class InvalidCycle(NeumannLabError, ValueError):
    exit_code = 7


class DegreeMismatch(NeumannLabError, ValueError):
    exit_code = 8


class NotInDerivedSubgroup(NeumannLabError, ValueError):
    """The element has nonzero sigma exponent, so it is not in N."""

    exit_code = 9


class NotBlockPreserving(NeumannLabError, ValueError):
    exit_code = 11


class MissingProbe(NeumannLabError, KeyError):
    exit_code = 12
