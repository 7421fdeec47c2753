"""Exception hierarchy for qxcomp."""


class QxcompError(Exception):
    """Base class for all errors raised by this package."""


class InputError(QxcompError, ValueError):
    """Malformed or invalid user input (maps to CLI exit code 2)."""


class NumericalError(QxcompError, ArithmeticError):
    """Numerical failure during a computation (maps to CLI exit code 3)."""


class NotHermitian(InputError):
    pass


class NotDensityMatrix(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class DomainError(InputError):
    pass


class SizeOverflow(InputError):
    pass


class ExactCapExceeded(InputError):
    pass


class EmptySequence(InputError):
    pass


class InvalidDistribution(InputError):
    pass


class ZeroProbabilityLetter(InputError):
    pass


class KraftViolated(InputError):
    pass


class DecodeError(InputError):
    pass


class NoConvergence(NumericalError):
    pass


class SupportMismatch(NumericalError):
    """The true state has weight outside the support of the believed state."""


class EmptyProjector(NumericalError):
    """No product basis state satisfies the length condition."""
