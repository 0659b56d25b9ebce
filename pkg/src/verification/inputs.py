"""
Input generators for the HeisenBH subelliptic geometry engine.
Band-limited trigonometric series drawn once and sampled on any grid, so a
refinement study sees the same smooth function at every level.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config.settings import Config
from fields.fields import MapField, ScalarField, SectionField
from fields.grid import BumpProfile, GridSpec
from models.target import TargetGeometry


@dataclass(frozen=True, eq=False)
class TrigSeries:
    """
    f^c(x) = offset^c + sum_j coefficients[c, j] cos(k_j . x + phase_j).

    Wavevectors have shape (terms, dim); coefficients (components, terms).
    """

    wavevectors: np.ndarray
    phases: np.ndarray
    coefficients: np.ndarray
    offset: np.ndarray

    @property
    def components(self) -> int:
        return self.coefficients.shape[0]

    def evaluate_points(self, points: np.ndarray) -> np.ndarray:
        """Values at points (..., dim), shape (components, ...)."""
        points = np.asarray(points, dtype=float)
        arguments = np.einsum('jd,...d->j...', self.wavevectors, points) + self.phases.reshape(
            (-1,) + (1,) * (points.ndim - 1))
        values = np.einsum('cj,j...->c...', self.coefficients, np.cos(arguments))
        return values + self.offset.reshape((-1,) + (1,) * (points.ndim - 1))

    def evaluate(self, grid: GridSpec) -> np.ndarray:
        return self.evaluate_points(grid.point_array())


class InputGenerator:
    """Draws band-limited series and random vectors from one numpy Generator."""

    def __init__(self, rng: np.random.Generator, dim: int, extent: float = Config.VERIFY_EXTENT,
                 terms: int = 2):
        self.rng = rng
        self.dim = dim
        self.extent = extent
        self.terms = terms

    def series(self, components: int = 1, amplitude: float = 1.0, offset=None) -> TrigSeries:
        """
        Draw a series with per-axis wavenumbers in {pi/2, pi} / L and random signs.

        The amplitude bounds the sup norm of the oscillating part.
        """
        magnitudes = self.rng.choice([0.5 * np.pi, np.pi], size=(self.terms, self.dim)) / self.extent
        signs = self.rng.choice([-1.0, 1.0], size=(self.terms, self.dim))
        phases = self.rng.uniform(0.0, 2.0 * np.pi, size=self.terms)
        coefficients = self.rng.uniform(-1.0, 1.0, size=(components, self.terms)) * amplitude / self.terms
        offset = np.zeros(components) if offset is None else np.asarray(offset, dtype=float)
        return TrigSeries(magnitudes * signs, phases, coefficients, offset)

    def vector(self, size: int) -> np.ndarray:
        """Standard normal vector, redrawn until nonzero."""
        while True:
            out = self.rng.standard_normal(size)
            if np.any(out):
                return out

    def points(self, count: int, fraction: float = 1.0) -> np.ndarray:
        """Uniform points in the box [-fraction L, fraction L]^dim."""
        bound = fraction * self.extent
        return self.rng.uniform(-bound, bound, size=(count, self.dim))

    def grid_index(self, grid: GridSpec, fraction: float) -> Tuple[int, ...]:
        """Random grid multi-index inside the interior mask."""
        candidates = np.argwhere(grid.interior_mask(fraction))
        return tuple(int(i) for i in candidates[self.rng.integers(len(candidates))])


def sample_scalar(series: TrigSeries, grid: GridSpec, profile: Optional[BumpProfile] = None) -> ScalarField:
    values = series.evaluate(grid)[0]
    if profile is not None:
        values = values * profile.weights(grid)
    return ScalarField(grid, values)


def sample_map(series: TrigSeries, grid: GridSpec, target: TargetGeometry,
               profile: Optional[BumpProfile] = None) -> MapField:
    """Map offset + (bump *) oscillation."""
    values = series.evaluate(grid)
    if profile is not None:
        offset = series.offset.reshape((-1,) + (1,) * grid.dim)
        values = offset + (values - offset) * profile.weights(grid)
    return MapField(grid, values, target)


def sample_section(series: TrigSeries, base_map: MapField, profile: Optional[BumpProfile] = None) -> SectionField:
    values = series.evaluate(base_map.grid)
    if profile is not None:
        values = values * profile.weights(base_map.grid)
    return SectionField(base_map.grid, values, base_map)
