"""
Utils package for the HeisenBH subelliptic geometry engine.
Contains formatting, validation and general helper utilities.
"""

from .validators import ValidatorUtils
from .formatters import FormatterUtils
from .helpers import HelperUtils

__all__ = [
    'ValidatorUtils',
    'FormatterUtils',
    'HelperUtils'
]
