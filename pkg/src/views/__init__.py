"""
Views package for the HeisenBH subelliptic geometry engine.
Contains the command-line interface.
"""

from .cli import build_parser, main

__all__ = [
    'build_parser',
    'main'
]
