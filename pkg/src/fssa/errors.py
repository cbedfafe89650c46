"""Exception types shared across the package."""


class FSSAError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(FSSAError, ValueError):
    """Inconsistent or malformed construction parameters."""


class DimensionError(FSSAError, ValueError):
    """Mismatched array shapes, series lengths or basis systems."""


class WindowLengthError(FSSAError, ValueError):
    """Window length outside the admissible range 2 <= L <= N // 2."""


class ProjectionError(FSSAError, ValueError):
    """Least-squares basis fit is underdetermined or rank deficient."""


class DegenerateSeriesError(FSSAError, RuntimeError):
    """Input carries no usable signal (all eigenvalues below tolerance,
    zero-norm series, or a Gram matrix that is not positive definite)."""
