"""Exception and warning types shared across the package."""


class CatswapError(Exception):
    """Base class for all package-specific errors."""


class TruncationError(CatswapError):
    """A state or grid does not fit inside the truncated basis / plot window."""


class DegenerateCatError(CatswapError):
    """Requested cat superposition is a null vector (branches cancel)."""


class DegenerateCatWarning(UserWarning):
    """Cat branches coincide; the returned state is a single coherent branch."""


class DimensionMismatch(CatswapError, ValueError):
    """Operands live on differently sized Hilbert-space factors."""


class IndexOutOfRange(CatswapError, IndexError):
    """Basis index outside the valid range for the configured space."""


class InvalidAngularMomentum(CatswapError, ValueError):
    """Angular-momentum arguments are not half-integral."""


class StepSizeTooLarge(CatswapError):
    """Integrator drift exceeded tolerance; reduce dt."""


class PositivityViolation(CatswapError):
    """Density matrix developed an eigenvalue below the allowed floor."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class RealityViolation(CatswapError):
    """A quantity that must be real carried too large an imaginary residue."""


class ConfigError(CatswapError):
    """Experiment configuration failed to parse or validate."""
