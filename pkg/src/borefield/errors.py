"""Exception types raised across the package."""


class BorefieldError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(BorefieldError, ValueError):
    """One or more input invariants are violated.

    Collects every failure so callers see all problems at once instead of
    fixing them one by one.
    """

    def __init__(self, failures):
        if isinstance(failures, str):
            failures = [failures]
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class DegenerateDomainError(BorefieldError, ValueError):
    """Rejection sampling cannot hit the domain (acceptance rate too low)."""


class ParseError(BorefieldError, ValueError):
    """A document could not be parsed; carries the position when known.

    Attributes
    ----------
    line, column : int or None
    """

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class QuadratureError(BorefieldError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Attributes
    ----------
    interval : tuple of float
        The (lower, upper) bounds of the offending interval.
    achieved : float
        Relative error estimate actually reached.
    """

    def __init__(self, message, interval=None, achieved=None):
        super().__init__(message)
        self.interval = interval
        self.achieved = achieved


class CoefficientOverflowError(BorefieldError, OverflowError):
    """gamma * L exceeds the stable range of the hyperbolic coefficients."""


class InfeasibleAtMaxLength(BorefieldError):
    """No borehole length within bounds satisfies the temperature limits.

    Attributes
    ----------
    violation : float
        Worst constraint violation in kelvin at the upper length bound.
    """

    def __init__(self, violation, message=None):
        self.violation = float(violation)
        if message is None:
            message = (
                f"temperature limits violated by {self.violation:.6g} K "
                "even at the maximum borehole length"
            )
        super().__init__(message)
