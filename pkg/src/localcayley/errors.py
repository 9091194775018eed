"""Exception hierarchy for the localcayley package."""


class LocalCayleyError(Exception):
    """Base class for all package errors."""


class NotPrime(LocalCayleyError):
    """The requested characteristic is not a prime number."""


class ReduciblePolynomial(LocalCayleyError):
    """The supplied modulus polynomial factors over F_p."""


class DegreeTooLarge(LocalCayleyError):
    """The requested extension degree or field size exceeds the supported range."""


class DimensionMismatch(LocalCayleyError):
    """Two vectors live in different spaces or over different fields."""


class SizeCapExceeded(LocalCayleyError):
    """An operation would allocate or enumerate beyond the configured cap."""

    def __init__(self, message: str, required: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.required = required
        self.cap = cap


class NumericalDrift(LocalCayleyError):
    """A float quantity that must be integral failed the integrality gate."""


class NotOnSphere(LocalCayleyError):
    """An input set or configuration is required to lie on a unit sphere but does not."""


class NotGoodTuple(LocalCayleyError):
    """A cycle built from a supposedly good tuple failed its distinctness check.

    This signals a bug in goodness checking, not a user error.
    """


class InfeasibleSize(LocalCayleyError):
    """A requested construction size cannot be met by the available point supply."""


class PreconditionFailed(LocalCayleyError):
    """A documented precondition of an operation does not hold for the input."""


class InvariantViolation(LocalCayleyError):
    """An exact mathematical identity that must hold was falsified at runtime.

    Raising this always indicates an implementation bug.
    """
