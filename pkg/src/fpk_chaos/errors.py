"""Exception hierarchy shared by all modules."""


class FpkError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(FpkError, ValueError):
    """Invalid run configuration or argument."""


class SizingError(FpkError, ValueError):
    """An enumeration or system would exceed a configured size cap."""


class PrecisionError(FpkError, ArithmeticError):
    """A quadrature rule cannot integrate the requested integrand exactly."""


class NumericalError(FpkError, ArithmeticError):
    """A solver produced non-finite values or an unusable factorization."""


class StepSizeError(NumericalError):
    """Explicit time stepping became unstable."""


class StabilityError(ConfigError):
    """A time step violates the linear stability bound of an explicit scheme."""
