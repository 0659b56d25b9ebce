"""
Discrete fields for the HeisenBH subelliptic geometry engine.
Scalar fields, horizontal fields, target-valued maps and pullback sections on a GridSpec,
with frame derivatives, quadrature against theta ^ (d theta)^n and the hfield file format.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple, Union

import numpy as np

from config.settings import Config
from models.errors import FieldFormatError, GridError
from models.heisenberg import HeisenbergModel, volume_density
from models.target import TargetGeometry
from utils.formatters import FormatterUtils
from .grid import BumpProfile, GridSpec

logger = logging.getLogger(__name__)


def _require_shape(values: np.ndarray, shape: Tuple[int, ...], what: str):
    if values.shape != shape:
        raise GridError(f"{what} has shape {values.shape}, expected {shape}")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real function sampled on every grid point."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=float))
        _require_shape(self.values, self.grid.shape, "Scalar field")

    def __add__(self, other: 'ScalarField') -> 'ScalarField':
        return ScalarField(self.grid, self.values + _values_of(other))

    def __sub__(self, other: 'ScalarField') -> 'ScalarField':
        return ScalarField(self.grid, self.values - _values_of(other))

    def __mul__(self, other: Union['ScalarField', float]) -> 'ScalarField':
        return ScalarField(self.grid, self.values * _values_of(other))

    __rmul__ = __mul__

    def __neg__(self) -> 'ScalarField':
        return ScalarField(self.grid, -self.values)


def _values_of(other) -> np.ndarray:
    return other.values if isinstance(other, ScalarField) else np.asarray(other, dtype=float)


@dataclass(frozen=True, eq=False)
class HorizontalField:
    """Horizontal vector field as 2n coefficients against the frame X~_a."""

    grid: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', np.asarray(self.coefficients, dtype=float))
        _require_shape(self.coefficients, (2 * self.grid.n,) + self.grid.shape, "Horizontal field")

    def scaled(self, weight: np.ndarray) -> 'HorizontalField':
        return HorizontalField(self.grid, self.coefficients * weight)


@dataclass(frozen=True, eq=False)
class MapField:
    """
    Map from the grid into the target, stored as chart values phi^i, shape (nu, *grid.shape).

    Construction validates the chart, so every MapField is admissible.
    """

    grid: GridSpec
    values: np.ndarray
    target: TargetGeometry
    max_chart_norm: float = field(init=False, default=0.0)

    def __post_init__(self):
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=float))
        _require_shape(self.values, (self.target.nu,) + self.grid.shape, "Map field")
        object.__setattr__(self, 'max_chart_norm', self.target.check_chart(self.values))

    @property
    def chart_values(self) -> np.ndarray:
        return self.values

    @property
    def nu(self) -> int:
        return self.target.nu

    @classmethod
    def constant(cls, grid: GridSpec, target: TargetGeometry, point) -> 'MapField':
        point = np.asarray(point, dtype=float).reshape((target.nu,) + (1,) * grid.dim)
        return cls(grid, np.broadcast_to(point, (target.nu,) + grid.shape).copy(), target)

    def displaced(self, section: 'SectionField', step: float) -> 'MapField':
        """Chart-linear variation phi + step * V."""
        return MapField(self.grid, self.values + step * section.components, self.target)

    def metric(self) -> np.ndarray:
        return self._metric

    def christoffel(self) -> np.ndarray:
        return self._christoffel

    @cached_property
    def _metric(self) -> np.ndarray:
        return self.target.metric(self.values)

    @cached_property
    def _christoffel(self) -> np.ndarray:
        return self.target.christoffel(self.values)


@dataclass(frozen=True, eq=False)
class SectionField:
    """Section V = V^i X_i^phi of the pullback bundle, components shape (nu, *grid.shape)."""

    grid: GridSpec
    components: np.ndarray
    base_map: MapField

    def __post_init__(self):
        object.__setattr__(self, 'components', np.asarray(self.components, dtype=float))
        if self.base_map.grid != self.grid:
            raise GridError("Section and base map live on different grids")
        _require_shape(self.components, (self.base_map.nu,) + self.grid.shape, "Section field")

    @classmethod
    def zeros(cls, base_map: MapField) -> 'SectionField':
        return cls(base_map.grid, np.zeros_like(base_map.values), base_map)

    def with_components(self, components: np.ndarray) -> 'SectionField':
        return SectionField(self.grid, components, self.base_map)

    def __add__(self, other: 'SectionField') -> 'SectionField':
        return self.with_components(self.components + other.components)

    def __sub__(self, other: 'SectionField') -> 'SectionField':
        return self.with_components(self.components - other.components)

    def __mul__(self, weight) -> 'SectionField':
        weight = weight.values if isinstance(weight, ScalarField) else weight
        return self.with_components(self.components * weight)

    __rmul__ = __mul__

    def __neg__(self) -> 'SectionField':
        return self.with_components(-self.components)

    def pointwise_norm(self) -> np.ndarray:
        """h^phi(V, V)^(1/2) at every grid point."""
        h = self.base_map.metric()
        return np.sqrt(np.maximum(np.einsum('ij...,i...,j...->...', h, self.components, self.components), 0.0))


# Array-level derivatives shared by the operator calculus

def apply_coordinate_derivative(values: np.ndarray, grid: GridSpec, axis: int) -> np.ndarray:
    return grid.finite_difference.diff(values, axis)


def apply_frame_derivative(values: np.ndarray, grid: GridSpec, model: HeisenbergModel, a: int) -> np.ndarray:
    """X~_a applied to an array whose trailing axes are the grid axes."""
    if model.n != grid.n:
        raise GridError(f"Model has n={model.n}, grid has n={grid.n}")
    n = grid.n
    if not 1 <= a <= 2 * n:
        raise IndexError(f"Frame index {a} outside 1..{2 * n}")
    fd = grid.finite_difference
    dt = fd.diff(values, 2 * n)
    if a <= n:
        alpha = a - 1
        return model.s * (fd.diff(values, alpha) + 2.0 * grid.mesh[n + alpha] * dt)
    alpha = a - n - 1
    return model.s * (fd.diff(values, n + alpha) - 2.0 * grid.mesh[alpha] * dt)


# Operations on fields

def coordinate_derivative(f: ScalarField, axis: int) -> ScalarField:
    """d f / d x^A with the grid's stencil order."""
    return ScalarField(f.grid, apply_coordinate_derivative(f.values, f.grid, axis))


def frame_derivative(f: ScalarField, a: int, model: HeisenbergModel) -> ScalarField:
    return ScalarField(f.grid, apply_frame_derivative(f.values, f.grid, model, a))


def integrate_array(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Trapezoid quadrature against Psi over the trailing grid axes."""
    return volume_density(grid.n) * np.sum(values * grid.quadrature_weights,
                                           axis=tuple(range(values.ndim - grid.dim, values.ndim)))


def integrate(f: ScalarField) -> float:
    """Integral of f against theta ^ (d theta)^n over the box."""
    return float(integrate_array(f.values, f.grid))


def metric_pairing(base_map: MapField, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Pointwise h_{ij}(phi) v^i w^j."""
    return np.einsum('ij...,i...,j...->...', base_map.metric(), v, w)


def l2_inner(v: SectionField, w: SectionField) -> float:
    """
    L^2 product of two sections over the same map.

    Raises:
        GridError: if the sections live on different grids or base maps
    """
    if v.grid != w.grid:
        raise GridError("Sections live on different grids")
    if v.base_map is not w.base_map and not np.array_equal(v.base_map.values, w.base_map.values):
        raise GridError("Sections live over different base maps")
    return float(integrate_array(metric_pairing(v.base_map, v.components, w.components), v.grid))


def make_bump(grid: GridSpec, profile: BumpProfile = None) -> ScalarField:
    profile = profile if profile is not None else BumpProfile()
    return ScalarField(grid, profile.weights(grid))


# hfield v1 files

def write_hfield(path: str, grid: GridSpec, values: np.ndarray):
    """
    Write components (nu, *grid.shape) or a scalar array (*grid.shape) as hfield v1.

    One row per grid point in storage order, nu values per row.
    """
    values = np.asarray(values, dtype=float)
    if values.shape == grid.shape:
        values = values[None]
    _require_shape(values, (values.shape[0],) + grid.shape, "Field")
    rows = values.reshape(values.shape[0], -1).T
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(FormatterUtils.field_header(grid.n, values.shape[0], grid.points, grid.extents) + '\n')
        for row in rows:
            handle.write(FormatterUtils.format_row(row) + '\n')
    logger.debug(f"Wrote {rows.shape[0]} rows to {path}")


def read_hfield(path: str, stencil_order: int = Config.STENCIL_ORDER) -> Tuple[GridSpec, np.ndarray]:
    """
    Read an hfield v1 file.

    Returns:
        Tuple[GridSpec, np.ndarray]: grid and components of shape (nu, *grid.shape)

    Raises:
        FieldFormatError: on a malformed header or row
    """
    with open(path, 'r', encoding='utf-8') as handle:
        header = FormatterUtils.parse_field_header(handle.readline())
        try:
            grid = GridSpec(n=header['n'], extents=header['extent'], points=header['dims'],
                            stencil_order=stencil_order)
        except GridError as exc:
            raise FieldFormatError(f"Header describes an invalid grid: {exc}") from exc
        rows = []
        for number, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            try:
                row = [float(token) for token in line.split()]
            except ValueError as exc:
                raise FieldFormatError(f"Line {number}: {exc}") from exc
            if len(row) != header['nu']:
                raise FieldFormatError(f"Line {number} has {len(row)} values, expected {header['nu']}")
            rows.append(row)
    if len(rows) != grid.size:
        raise FieldFormatError(f"File has {len(rows)} rows, grid needs {grid.size}")
    values = np.asarray(rows).T.reshape((header['nu'],) + grid.shape)
    return grid, values
