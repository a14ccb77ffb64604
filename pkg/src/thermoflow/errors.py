"""Exception hierarchy shared by all modules.

Each class carries the CLI exit code it maps to.
"""


class ThermoflowError(Exception):
    exit_code = 1


class InputError(ThermoflowError, ValueError):
    """Malformed input: bad symbols, missing potential values, bad parameters."""

    exit_code = 2


class DepthError(InputError):
    """A block depth or potential depth is incompatible with the system."""


class EmptySystemError(ThermoflowError):
    """The shift has no admissible words of the requested length, or no cycles."""

    exit_code = 3


class HypothesisError(ThermoflowError):
    """A mathematical precondition fails (e.g. the subsystem has zero entropy)."""

    exit_code = 4


class NumericError(ThermoflowError, ArithmeticError):
    """An iterative method failed to converge or to bracket its root."""

    exit_code = 5
