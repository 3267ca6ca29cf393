"""Exception types raised by the solvers and checks."""


class BanachVIError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(BanachVIError, ValueError):
    """Vector length does not match the space dimension."""


class ProjectionError(BanachVIError):
    """A projection could not be computed (empty set or nonconvergence)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResolventError(BanachVIError):
    """The equilibrium resolvent could not be computed to tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ScheduleError(BanachVIError, ValueError):
    """A parameter schedule violates the convergence hypotheses."""


class ProblemError(BanachVIError, ValueError):
    """A problem definition is incomplete or inconsistent with an algorithm."""
