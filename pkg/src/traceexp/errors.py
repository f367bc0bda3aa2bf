"""Exception types raised by the library.

Every error derives from :class:`TraceExpError` so callers (the CLI in
particular) can map whole families onto exit codes.
"""


class TraceExpError(Exception):
    """Base class for all library errors."""


class DomainError(TraceExpError, ValueError):
    """A numeric argument is NaN/Inf or outside the supported range."""


class NotHermitianError(DomainError):
    pass


class DegenerateAError(DomainError):
    """``tr(A0^2)`` vanishes, so the shift ``t0`` is undefined."""


class SizeGuardError(DomainError):
    pass


class OddLengthError(DomainError):
    pass


class RangeError(DomainError):
    pass


class NoConvergence(TraceExpError, ArithmeticError):
    pass


class QuadratureNoConvergence(NoConvergence):
    pass
