"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class CoincidenceError(ValueError):
    """Two points of a configuration coincide, so a log interaction is infinite."""


class QuadratureError(ArithmeticError):
    """A quadrature error estimate exceeded the requested tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative solver did not converge.

    The best iterate found so far, when there is one, is kept on ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class AlignmentError(RuntimeError):
    """No cut point with matching lifted means could be bracketed on the circle."""


class SpecError(ValueError):
    """A measure, potential or kernel specification string could not be parsed."""
