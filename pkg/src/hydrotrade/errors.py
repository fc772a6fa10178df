"""Exception hierarchy shared by every module of the package."""


class SizingError(Exception):
    """Base class for all sizing failures."""


class DomainError(SizingError, ValueError):
    """An input lies outside the domain of a model (e.g. non-positive x)."""


class UnitMismatchError(SizingError, ValueError):
    """A quantity was fed to a law expecting a different quantity."""


class FitError(SizingError):
    """Catalog data cannot support a scaling-law fit."""


class SolverError(SizingError):
    """The ratio fixed-point iteration did not converge."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class InfeasibleError(SizingError):
    """No design satisfies the requirement."""


class CapabilityError(SizingError):
    """An operating point exceeds the torque or speed limits of a drivetrain."""
