"""Exception types shared across the package."""


class DegeneracyError(ValueError):
    """A subproblem is numerically singular (dependent columns, zero pivot, ...)."""


class BlowUpError(RuntimeError):
    """A time integration produced non-finite values.

    Attributes
    ----------
    step : int
        Index of the step at which the blow-up was detected.
    t : float
        Simulation time at that step.
    """

    def __init__(self, message, step=None, t=None):
        super().__init__(message)
        self.step = step
        self.t = t
