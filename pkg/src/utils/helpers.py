"""
HelperUtils for the HeisenBH subelliptic geometry engine.
Logging setup, file output, timing and convergence-slope helpers.
"""

import logging
import os
import time
from contextlib import contextmanager
from typing import Dict, Iterator, Optional, Sequence

import numpy as np

from config.settings import Config


class HelperUtils:
    """General helpers for the application layer."""

    @staticmethod
    def setup_logging(level: Optional[str] = None):
        """Configure the root logger on stderr; later calls only adjust the level."""
        level = (level or Config.LOG_LEVEL).upper()
        numeric = getattr(logging, level, None)
        if not isinstance(numeric, int):
            raise ValueError(f"Unknown log level '{level}'")
        logging.basicConfig(level=numeric, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
        logging.getLogger().setLevel(numeric)

    @staticmethod
    def ensure_directory(path: str) -> str:
        os.makedirs(path, exist_ok=True)
        return path

    @staticmethod
    def write_text(path: str, text: str) -> str:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        return path

    @staticmethod
    def observed_order(spacings: Sequence[float], residuals: Sequence[float]) -> Optional[float]:
        """
        Least-squares slope of log(residual) against log(spacing).

        Returns None with fewer than two usable levels (zero residuals are skipped).
        """
        pairs = [(h, r) for h, r in zip(spacings, residuals) if h > 0 and r > 0 and np.isfinite(r)]
        if len(pairs) < 2:
            return None
        log_h = np.log([h for h, _ in pairs])
        log_r = np.log([r for _, r in pairs])
        slope, _ = np.polyfit(log_h, log_r, 1)
        return float(slope)

    @staticmethod
    @contextmanager
    def timed(timings: Dict[str, float], key: str) -> Iterator[None]:
        """Record wall time of the block under `key` in seconds."""
        start = time.perf_counter()
        try:
            yield
        finally:
            timings[key] = time.perf_counter() - start
