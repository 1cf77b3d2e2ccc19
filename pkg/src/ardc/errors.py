"""Exception hierarchy shared by all solver components."""


class ARDCError(Exception):
    """Base class for every error raised by :mod:`ardc`."""


class InvalidParameterError(ARDCError, ValueError):
    """A parameter lies outside its documented range."""


class DomainError(ARDCError, ValueError):
    """A coefficient was evaluated at (or beyond) a singular point."""


class OutOfRangeError(ARDCError, ValueError):
    """A query point lies outside the interval it refers to."""


class DegenerateDenominatorError(ARDCError, ArithmeticError):
    """``x + gamma`` came too close to zero inside the defect correction."""


class DegenerateMatchingError(ARDCError, ArithmeticError):
    """The 2x2 matching system of an oscillatory step is singular."""


class NumericalFailureError(ARDCError, ArithmeticError):
    """A least-squares factorization failed or produced non-finite output."""


class StepUnderflowError(ARDCError, RuntimeError):
    """The stepsize shrank below the allowed minimum."""

    def __init__(self, message, t=None, h_history=()):
        super().__init__(message)
        self.t = t
        self.h_history = list(h_history)


class OracleRefusal(ARDCError, RuntimeError):
    """A reference evaluator declined a request outside its budget or range."""


class InvalidBallError(ARDCError, ValueError):
    """Coefficients are not analytic (or not finite) on the requested ball."""
