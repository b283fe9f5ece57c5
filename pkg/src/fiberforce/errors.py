"""Exception types shared across the package."""


class FiberForceError(Exception):
    """Base class for all package-specific errors."""


class ModeBelowCutoff(FiberForceError):
    """Requested guided mode does not exist at this frequency."""


class NoConvergence(FiberForceError):
    """An iterative solver or quadrature failed to converge."""


class PolarizationMismatch(FiberForceError):
    """Drive polarization specifier conflicts with the mode family."""


class EvanescentBeta(FiberForceError):
    """Radiation-mode propagation constant outside the radiation band."""


class InsideFiber(FiberForceError):
    """Field point inside the fiber where exterior formulas do not apply."""


class SaturationTooHigh(FiberForceError):
    """Weak-excitation formula requested outside its validity range."""


class ConfigInvalid(FiberForceError):
    """Scan configuration failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
