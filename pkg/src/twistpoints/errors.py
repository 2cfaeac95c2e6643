"""Exception types shared by every module."""


class ValidationError(ValueError):
    """Input data violates a documented invariant (not on curve, bad descent tuple, ...)."""


class DomainError(ValueError):
    """Input is outside the domain of the operation (torsion point, zero modulus, ...)."""


class RangeError(DomainError):
    """Integer argument outside the supported range 1 <= n < 2**96."""


class PrecisionError(ArithmeticError):
    """A floating-point evaluation could not meet its integrality slack."""


class ResourceError(RuntimeError):
    """A configured budget (digits, candidates, box volume) was exceeded.

    ``partial`` holds whatever was computed before the budget ran out and
    ``cursor`` is an opaque value that lets the caller resume, when the
    operation supports resuming.
    """

    def __init__(self, message, partial=None, cursor=None):
        super().__init__(message)
        self.partial = partial
        self.cursor = cursor
