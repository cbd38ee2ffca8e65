"""Exception types raised across the package."""


class GridMismatchError(ValueError):
    """Two operands live on different grids."""


class PositivityError(ValueError):
    """A density (or Jacobian) that must be strictly positive is not."""


class MonotonicityError(ValueError):
    """A diffeomorphism lost strict monotonicity (winding number 1)."""


class InversionError(RuntimeError):
    """Bisection failed to invert a diffeomorphism to tolerance."""


class FiniteDifferenceError(ValueError):
    """A finite-difference step is unusable (non-positive or underflowing)."""


class SimulationAbort(RuntimeError):
    """A time integration had to stop (CFL violation, positivity loss, ...).

    Attributes:
        time: simulation time at which the abort happened.
    """

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t = {time:.6g})")
        self.time = time
