"""Exception types shared across the package."""

from __future__ import annotations


class CapExceededError(ValueError):
    """A mode index (or index bound) is above the hard cap."""


class NumericOverflowError(FloatingPointError):
    """A non-finite value appeared while filling a table; names the index."""

    def __init__(self, message: str, index=None):
        super().__init__(message)
        self.index = index


class NotPositiveDefiniteError(ValueError):
    """A 2D refractive profile's quadratic form is not positive definite."""


class ConvergenceError(RuntimeError):
    """Newton polishing of a quadrature node failed; names the node."""

    def __init__(self, message: str, node_index=None):
        super().__init__(message)
        self.node_index = node_index


class PartialSpectrumError(RuntimeError):
    """Spectrum hit the index cap before reaching the target mass.

    Carries the partial result so callers can still inspect or emit it.
    """

    def __init__(self, message: str, spectrum=None):
        super().__init__(message)
        self.spectrum = spectrum

    @property
    def captured_mass(self):
        return None if self.spectrum is None else self.spectrum.captured_mass


class PartialTensorError(RuntimeError):
    """2D tensor hit the index cap before reaching the target mass."""

    def __init__(self, message: str, tensor=None):
        super().__init__(message)
        self.tensor = tensor

    @property
    def captured_mass(self):
        return None if self.tensor is None else self.tensor.captured_mass
