"""Exception types raised across the package."""


class QjumpsError(Exception):
    """Base class for all package errors."""


class NonPowerOfTwoError(QjumpsError, ValueError):
    """Grid size is not a power of two (spectral steps require one)."""


class GridMismatchError(QjumpsError, ValueError):
    """Two states or kernels live on different grids."""


class ZeroNormError(QjumpsError, ValueError):
    """Wavefunction norm is too small to normalize."""


class DegenerateStateError(QjumpsError, ValueError):
    """State variance is too small for the jump map or rate."""


class UnknownObservableError(QjumpsError, ValueError):
    """Observable name not in the supported set."""


class NotPositiveDefiniteError(QjumpsError, ValueError):
    """Correlation kernel cannot be factorized on the target grid."""


class StepTooCoarseError(QjumpsError, ValueError):
    """Time step violates the per-step jump-probability guard."""


class DivergenceDetectedError(QjumpsError, RuntimeError):
    """Trace drift or NaN appeared during evolution."""


class ConfigError(QjumpsError, ValueError):
    """Configuration file is missing keys or holds invalid values."""
