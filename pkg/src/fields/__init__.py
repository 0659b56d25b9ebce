"""
Fields package for the HeisenBH subelliptic geometry engine.
Contains grids, finite-difference stencils, discrete fields and quadrature.
"""

from .finite_difference import FiniteDifference, stencil_weights
from .grid import GridSpec, BumpProfile
from .fields import (
    ScalarField,
    HorizontalField,
    MapField,
    SectionField,
    coordinate_derivative,
    frame_derivative,
    integrate,
    l2_inner,
    make_bump,
    read_hfield,
    write_hfield,
)

__all__ = [
    'FiniteDifference',
    'stencil_weights',
    'GridSpec',
    'BumpProfile',
    'ScalarField',
    'HorizontalField',
    'MapField',
    'SectionField',
    'coordinate_derivative',
    'frame_derivative',
    'integrate',
    'l2_inner',
    'make_bump',
    'read_hfield',
    'write_hfield',
]
