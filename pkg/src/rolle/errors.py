"""Exception types raised across the package."""


class RolleError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidDegree(RolleError):
    pass


class InvalidInput(RolleError):
    pass


class InvalidParamPoint(RolleError):
    pass


class InvalidScale(RolleError):
    pass


class DegenerateSpan(RolleError):
    pass


class ShiftTooLarge(RolleError):
    pass


class TooFewRoots(RolleError):
    pass


class SolverFailure(RolleError):
    """Bisection did not converge. Never expected for hyperbolic input."""


class NotHyperbolic(RolleError):
    pass


class PoleAt(RolleError):
    def __init__(self, x):
        super().__init__(f"logarithmic derivative has a pole at x={x!r}")
        self.x = x


class OutsideDomain(RolleError):
    pass


class UnresolvedCell(RolleError):
    """Refinement reached the minimal step with failing points left."""


class ConfigError(RolleError):
    pass
