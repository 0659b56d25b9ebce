"""
Operators package for the HeisenBH subelliptic geometry engine.
Contains the subelliptic operator calculus and the Fefferman lift calculus.
"""

from .subelliptic import Direction, SubellipticCalculus
from .fefferman import CircleGrid, FeffermanMetric, FeffermanLift, LiftedField, LiftedScalar, LiftedSection

__all__ = [
    'Direction',
    'SubellipticCalculus',
    'CircleGrid',
    'FeffermanMetric',
    'FeffermanLift',
    'LiftedField',
    'LiftedScalar',
    'LiftedSection',
]
