"""Exception types raised by the solvers and drivers."""


class ParameterError(ValueError):
    """A parameter violates a stability window, range, or consistency rule."""


class TimeAlignmentError(ParameterError):
    """The final time is not an integer multiple of the time step."""


class EigenvalueConvergenceError(ArithmeticError):
    """Polishing could not bring an eigenpair residual below tolerance."""
