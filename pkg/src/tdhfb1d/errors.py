"""Exception and warning types shared across the package."""


class TdhfbError(Exception):
    """Base class for all package-specific errors."""


class GridMismatch(TdhfbError, ValueError):
    """Two objects that must live on the same grid do not."""


class UnderresolvedPotential(TdhfbError, ValueError):
    """The grid cannot represent the scaled interaction for these (N, beta)."""


class NonConvergence(TdhfbError, RuntimeError):
    """A truncated operator series failed to reach tolerance within the term cap."""


class NoContraction(TdhfbError, RuntimeError):
    """Fixed-point iteration stopped contracting; the time window is too large."""


class NonHermitianDiagonal(TdhfbError, ValueError):
    """The diagonal of a kernel that should be hermitian has a large imaginary part."""


class SymmetryDrift(TdhfbError, RuntimeError):
    """Symmetry class of an evolved kernel drifted beyond the instability threshold."""


class ConfigError(TdhfbError, ValueError):
    """A run configuration file failed to parse or validate."""


class NegativePairKinetic(UserWarning):
    """The pair-kinetic energy term came out with a non-negligible imaginary part."""
