"""
GridSpec and BumpProfile for the HeisenBH subelliptic geometry engine.
Uniform boxes in H_n and compact-support weights on them.
"""

from dataclasses import dataclass, replace
from functools import cached_property, reduce
from math import comb
from typing import Any, Dict, Tuple

import numpy as np

from config.settings import Config
from config.constants import MIN_POINTS_PER_AXIS, SUPPORTED_STENCIL_ORDERS
from models.errors import GridError
from .finite_difference import FiniteDifference


@dataclass(frozen=True)
class GridSpec:
    """
    Box [-L_A, L_A] per axis of H_n sampled with an odd number of points.

    Storage is axis-major with the last axis (t) fastest, matching
    numpy C order of arrays shaped `shape`.
    """

    n: int
    extents: Tuple[float, ...]
    points: Tuple[int, ...]
    stencil_order: int = Config.STENCIL_ORDER

    def __post_init__(self):
        object.__setattr__(self, 'extents', tuple(float(e) for e in self.extents))
        object.__setattr__(self, 'points', tuple(int(p) for p in self.points))
        dim = 2 * self.n + 1
        if self.n < 1:
            raise GridError(f"CR dimension must be >= 1, got {self.n}")
        if len(self.extents) != dim or len(self.points) != dim:
            raise GridError(f"Grid for n={self.n} needs {dim} extents and point counts")
        for axis, (extent, count) in enumerate(zip(self.extents, self.points)):
            if not extent > 0:
                raise GridError(f"Axis {axis} extent must be positive, got {extent}")
            if count < MIN_POINTS_PER_AXIS or count % 2 == 0:
                raise GridError(f"Axis {axis} needs an odd point count >= {MIN_POINTS_PER_AXIS}, got {count}")
        if self.stencil_order not in SUPPORTED_STENCIL_ORDERS:
            raise GridError(f"Stencil order {self.stencil_order} not in {SUPPORTED_STENCIL_ORDERS}")

    @classmethod
    def uniform(cls, n: int, extent: float = Config.GRID_EXTENT, points: int = Config.GRID_POINTS,
                stencil_order: int = Config.STENCIL_ORDER) -> 'GridSpec':
        dim = 2 * n + 1
        return cls(n=n, extents=(extent,) * dim, points=(points,) * dim, stencil_order=stencil_order)

    def with_points(self, points: int) -> 'GridSpec':
        return replace(self, points=(points,) * self.dim)

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(2.0 * extent / (count - 1) for extent, count in zip(self.extents, self.points))

    @property
    def max_spacing(self) -> float:
        return max(self.spacing)

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return np.linspace(-self.extents[axis], self.extents[axis], self.points[axis])

    @cached_property
    def mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*[self.axis_coordinates(a) for a in range(self.dim)], indexing='ij'))

    @cached_property
    def finite_difference(self) -> FiniteDifference:
        return FiniteDifference(self.spacing, self.points, self.stencil_order)

    @cached_property
    def quadrature_weights(self) -> np.ndarray:
        """Tensor-product trapezoid weights (Lebesgue measure, no volume density)."""
        per_axis = []
        for axis in range(self.dim):
            weights = np.full(self.points[axis], self.spacing[axis])
            weights[0] *= 0.5
            weights[-1] *= 0.5
            per_axis.append(weights)
        return reduce(np.multiply.outer, per_axis)

    def point_array(self) -> np.ndarray:
        """Grid points stacked on a trailing coordinate axis, shape (*shape, dim)."""
        return np.stack(self.mesh, axis=-1)

    def interior_mask(self, fraction: float) -> np.ndarray:
        """True where every |x_A| <= fraction * L_A."""
        mask = np.ones(self.shape, dtype=bool)
        for axis in range(self.dim):
            mask &= np.abs(self.mesh[axis]) <= fraction * self.extents[axis] + 1e-12
        return mask

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'extents': list(self.extents),
            'points': list(self.points),
            'stencil_order': self.stencil_order,
        }


@dataclass(frozen=True)
class BumpProfile:
    """
    Tensor-product weight: 1 on the inner box, 0 outside the outer box.

    The taper in the normalized radius r = |x_A| / L_A is the smoothstep
    polynomial of degree 2k + 1, which is C^k at both ends (k = 2 gives the
    quintic).
    """

    inner: float = Config.BUMP_INNER
    outer: float = Config.BUMP_OUTER
    smoothness: int = Config.BUMP_SMOOTHNESS

    def __post_init__(self):
        if not 0.0 < self.inner < self.outer < 1.0:
            raise ValueError(f"Bump radii need 0 < inner < outer < 1, got {self.inner}, {self.outer}")
        if int(self.smoothness) != self.smoothness or self.smoothness < 1:
            raise ValueError(f"Bump smoothness must be a positive integer, got {self.smoothness}")

    @cached_property
    def _smoothstep(self) -> np.polynomial.Polynomial:
        k = self.smoothness
        coefficients = np.zeros(2 * k + 2)
        for j in range(k + 1):
            coefficients[k + 1 + j] = (-1) ** j * comb(k + j, j) * comb(2 * k + 1, k - j)
        return np.polynomial.Polynomial(coefficients)

    def taper(self, radius: np.ndarray) -> np.ndarray:
        """One-dimensional weight as a function of normalized radius."""
        u = np.clip((np.abs(radius) - self.inner) / (self.outer - self.inner), 0.0, 1.0)
        return 1.0 - self._smoothstep(u)

    def weights(self, grid: GridSpec) -> np.ndarray:
        return reduce(np.multiply, [self.taper(grid.mesh[a] / grid.extents[a]) for a in range(grid.dim)])

    def to_dict(self) -> Dict[str, Any]:
        return {'inner': self.inner, 'outer': self.outer, 'smoothness': self.smoothness}
