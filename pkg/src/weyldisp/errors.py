"""Exception types raised across the package."""


class WeyldispError(Exception):
    """Base class; the CLI maps these to exit codes."""

    exit_code = 1


class InvalidType(WeyldispError, ValueError):
    pass


class NonCrystallographic(WeyldispError, ValueError):
    pass


class ClassTooLarge(WeyldispError):
    pass


class NotTwistedInvolution(WeyldispError, ValueError):
    pass


class InternalContradiction(WeyldispError, AssertionError):
    pass


class NotInvolutionClass(WeyldispError, ValueError):
    pass


class NotCoxeterSystem(WeyldispError):
    pass


class NotBicapped(WeyldispError, ValueError):
    pass


class CapMissing(WeyldispError, ValueError):
    pass


class NotDivisible(WeyldispError, ArithmeticError):
    """Exact division left a remainder.

    ``quotient`` holds the exact rational quotient as a mapping
    radicand -> Fraction, so callers can report e.g. 315/17.
    """

    exit_code = 2

    def __init__(self, message, quotient=None):
        super().__init__(message)
        self.quotient = quotient


class NotAFlag(WeyldispError, ValueError):
    pass


class ReduciblePolynomial(WeyldispError, ValueError):
    pass


class EvenDimension(WeyldispError, ValueError):
    pass


class NoSuchGenerator(WeyldispError, ValueError):
    pass


class InvalidParameters(WeyldispError, ValueError):
    pass
