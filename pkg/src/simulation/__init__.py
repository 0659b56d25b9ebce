"""
Simulation package for the HeisenBH subelliptic geometry engine.
Contains the variational engine, the descent flow and the initial-map presets.
"""

from .variational import FlowConfig, FlowRecord, FlowTrace, VariationalEngine
from .presets import make_initial_map

__all__ = [
    'FlowConfig',
    'FlowRecord',
    'FlowTrace',
    'VariationalEngine',
    'make_initial_map'
]
