"""
Errors for the HeisenBH subelliptic geometry engine.
"""

from typing import Optional


class SubellipticError(Exception):
    """Base class for all engine errors."""


class GridError(SubellipticError, ValueError):
    """Grid too small for a stencil, or fields living on different grids."""


class ChartOverflowError(SubellipticError, ArithmeticError):
    """A map left the admissible region of the target chart."""

    def __init__(self, norm: float, bound: float, step: Optional[int] = None):
        self.norm = norm
        self.bound = bound
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"Chart norm {norm:.6g} reached bound {bound:.6g}{where}")


class NonFiniteError(SubellipticError, ArithmeticError):
    """NaN or infinity appeared in a field."""


class FieldFormatError(SubellipticError, ValueError):
    """Malformed hfield file."""


class ConfigError(SubellipticError, ValueError):
    """Invalid run configuration entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class UnknownCheckError(SubellipticError, ValueError):
    """Oracle id not registered in the suite."""
