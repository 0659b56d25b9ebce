"""
Verification package for the HeisenBH subelliptic geometry engine.
Contains the oracle suite, its input generators and the report records.
"""

from .inputs import InputGenerator, TrigSeries, sample_map, sample_scalar, sample_section
from .report import CheckResult, LevelResult, VerificationReport
from .oracle_suite import OracleSuite, SuiteSettings

__all__ = [
    'InputGenerator',
    'TrigSeries',
    'sample_map',
    'sample_scalar',
    'sample_section',
    'CheckResult',
    'LevelResult',
    'VerificationReport',
    'OracleSuite',
    'SuiteSettings',
]
