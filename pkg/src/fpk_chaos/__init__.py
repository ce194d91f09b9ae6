"""Hermite-chaos spectral Galerkin solver for Kolmogorov equations of
stochastic heat, Fisher-KPP and Burgers equations on [0, 1]."""

from .errors import ConfigError, FpkError, NumericalError, PrecisionError, SizingError, StepSizeError

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "FpkError",
    "NumericalError",
    "PrecisionError",
    "SizingError",
    "StepSizeError",
]
