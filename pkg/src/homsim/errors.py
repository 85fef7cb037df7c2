"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front-end:
2 for invalid input, 3 for numerical failures, 4 for I/O problems.
"""


class HomError(Exception):
    exit_code = 1


class ValidationError(HomError, ValueError):
    """Input violates a documented precondition."""

    exit_code = 2


class InvalidArgument(ValidationError):
    pass


class NonPositiveFrequency(ValidationError):
    pass


class InvalidCoefficients(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class BasisMismatch(ValidationError):
    pass


class BandOverlap(ValidationError):
    pass


class NonOrthonormalModes(ValidationError):
    pass


class TooManyModes(ValidationError):
    pass


class RankExceeded(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class NumericalError(HomError, ArithmeticError):
    """A residual or resolution check failed."""

    exit_code = 3


class PoorlyResolved(NumericalError):
    pass


class NotUnitary(NumericalError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class IoError(HomError, OSError):
    exit_code = 4
