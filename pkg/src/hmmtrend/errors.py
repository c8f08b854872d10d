"""Exception hierarchy shared by every module.

The CLI maps :class:`InputError` to exit code 1 and every other
:class:`HmmError` to exit code 2.
"""


class HmmError(Exception):
    """Base class for all errors raised by this package."""


class InputError(HmmError, ValueError):
    """Malformed input: unparseable files, bad dimensions, bad arguments."""


class ValidationError(HmmError, ValueError):
    """A model or matrix violates its stochastic constraints."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NonUniqueStationaryError(HmmError):
    """The chain has more than one closed communicating class."""

    def __init__(self, message, closed_classes):
        super().__init__(message)
        self.closed_classes = closed_classes


class ConvergenceError(HmmError):
    pass


class InfeasibleSequenceError(HmmError):
    """Every state path has probability zero for the given observations."""
