"""Exception types shared across the package."""


class HeckeisError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedFieldError(HeckeisError, ValueError):
    """A field was requested in a role it does not support."""


class DegenerateLatticeError(HeckeisError, ValueError):
    """Lattice data with a non-invertible y-part (or ill-conditioned norm)."""


class PoleError(HeckeisError, ArithmeticError):
    """Evaluation was requested at (or too close to) a pole.

    Carries the pole location and, when known, the residue there so that
    callers can switch to the Laurent-coefficient API.
    """

    def __init__(self, message, location=None, residue=None):
        super().__init__(message)
        self.location = location
        self.residue = residue


class ConvergenceError(HeckeisError, ArithmeticError):
    """An adaptive scheme hit its cap before reaching the requested tolerance."""


class EnumerationCapError(HeckeisError, ValueError):
    """A lattice enumeration would exceed the configured point cap."""
