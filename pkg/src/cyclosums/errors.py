"""Exception hierarchy shared by every module."""


class CycloError(Exception):
    """Base class for all library errors."""


class DomainError(CycloError, ValueError):
    """An argument violates a documented constraint."""


class InvalidOrderError(DomainError):
    """A root of unity was given with order zero."""


class DivergenceError(DomainError):
    """The requested series does not converge, e.g. (q, x) = (1, 1)."""


class PoleError(DomainError):
    """Evaluation at a pole."""


class PoleCollisionError(DomainError):
    """A rational-function pole sits on a kernel pole where that is not allowed."""


class UnsupportedDepthError(DomainError):
    """Multiple values are only evaluated up to depth three."""


class AccuracyError(CycloError, ArithmeticError):
    """An iterative procedure failed to reach the requested accuracy."""
