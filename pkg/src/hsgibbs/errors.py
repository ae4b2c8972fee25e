"""Exception hierarchy shared across the package."""


class HorseshoeError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(HorseshoeError, ValueError):
    pass


class NonFinite(HorseshoeError, ValueError):
    pass


class DegenerateResponse(HorseshoeError, ValueError):
    """Raised when y'y = 0, which several matrix bounds exclude."""


class InvalidParameter(HorseshoeError, ValueError):
    pass


class NumericalFailure(HorseshoeError, ArithmeticError):
    pass


class SingularSystem(NumericalFailure):
    pass


class OutOfSupport(HorseshoeError, ValueError):
    """A value lies outside the support of the density being evaluated."""


class EnvelopeViolation(HorseshoeError, ArithmeticError):
    """phi/(M psi) exceeded one: the rejection envelope is mathematically wrong."""


class RejectionCapExceeded(HorseshoeError, RuntimeError):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class RootNotBracketed(HorseshoeError, ArithmeticError):
    pass


class StressSearchDiverged(HorseshoeError, ArithmeticError):
    pass


class TooShort(HorseshoeError, ValueError):
    pass
