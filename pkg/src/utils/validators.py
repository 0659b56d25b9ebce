"""
ValidatorUtils for the HeisenBH subelliptic geometry engine.
Argument, shape and finiteness checks shared by the engine layers.
"""

from typing import Iterable, Sequence

import numpy as np

from config.constants import CHECK_IDS, FLOW_FUNCTIONALS, INITIAL_MAP_PRESETS
from models.errors import NonFiniteError, UnknownCheckError


class ValidatorUtils:
    """Validation helpers; each raises on failure and returns the checked value."""

    @staticmethod
    def require_finite(values: np.ndarray, what: str = "field") -> np.ndarray:
        """
        Reject NaN and infinite entries.

        Raises:
            NonFiniteError: if any entry is not finite
        """
        values = np.asarray(values)
        if not np.all(np.isfinite(values)):
            bad = int(np.size(values) - np.count_nonzero(np.isfinite(values)))
            raise NonFiniteError(f"{what} has {bad} non-finite entries")
        return values

    @staticmethod
    def require_positive(value: float, name: str) -> float:
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
        return value

    @staticmethod
    def require_index(index: int, low: int, high: int, name: str = "index") -> int:
        if not low <= index <= high:
            raise IndexError(f"{name} {index} outside {low}..{high}")
        return index

    @staticmethod
    def require_shape(values: np.ndarray, shape: Sequence[int], what: str) -> np.ndarray:
        values = np.asarray(values)
        if values.shape != tuple(shape):
            raise ValueError(f"{what} has shape {values.shape}, expected {tuple(shape)}")
        return values

    @staticmethod
    def validate_check_ids(check_ids: Iterable[str]) -> list:
        """
        Raises:
            UnknownCheckError: naming the first id that is not a known check
        """
        check_ids = list(check_ids)
        for check_id in check_ids:
            if check_id not in CHECK_IDS:
                raise UnknownCheckError(f"Unknown check id '{check_id}'")
        return check_ids

    @staticmethod
    def validate_functional(functional: str) -> str:
        if functional not in FLOW_FUNCTIONALS:
            raise ValueError(f"Unknown flow functional '{functional}', expected one of {FLOW_FUNCTIONALS}")
        return functional

    @staticmethod
    def validate_preset(preset: str) -> str:
        if preset not in INITIAL_MAP_PRESETS:
            raise ValueError(f"Unknown initial map '{preset}', expected one of {INITIAL_MAP_PRESETS}")
        return preset
