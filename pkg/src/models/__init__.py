"""
Models package for the HeisenBH subelliptic geometry engine.
Contains the Heisenberg group model, the target geometries and the error types.
"""

from .errors import (
    SubellipticError,
    GridError,
    ChartOverflowError,
    NonFiniteError,
    FieldFormatError,
    ConfigError,
    UnknownCheckError,
)
from .heisenberg import HeisenbergModel, volume_density, volume_form_coefficient
from .target import TargetGeometry, TargetKind

__all__ = [
    'SubellipticError',
    'GridError',
    'ChartOverflowError',
    'NonFiniteError',
    'FieldFormatError',
    'ConfigError',
    'UnknownCheckError',
    'HeisenbergModel',
    'volume_density',
    'volume_form_coefficient',
    'TargetGeometry',
    'TargetKind',
]
