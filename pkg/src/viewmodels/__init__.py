"""
ViewModels package for the HeisenBH subelliptic geometry engine.
Contains the state and output logic behind the command-line views.
"""

from .report_viewmodel import ReportViewModel
from .flow_viewmodel import FlowViewModel

__all__ = [
    'ReportViewModel',
    'FlowViewModel'
]
