"""Isomonodromic tau functions of branched covers and Hodge-class arithmetic
on spaces of admissible covers."""

__version__ = "0.1.0"


class InconsistentDataError(ValueError):
    """Raised when combinatorial or analytic input data is inconsistent."""


class NumericalError(ArithmeticError):
    """Raised when a numerical routine cannot certify its result."""
