"""
FiniteDifference for the HeisenBH subelliptic geometry engine.
First-derivative stencils of order 2, 4 or 6 on uniform axes.
"""

from functools import lru_cache
from math import factorial
from typing import Optional, Sequence, Tuple

import numpy as np

from config.constants import SUPPORTED_STENCIL_ORDERS
from models.errors import GridError


@lru_cache(maxsize=None)
def stencil_weights(offsets: Tuple[int, ...], derivative: int = 1) -> np.ndarray:
    """
    Weights w_j with sum_j w_j f(x + o_j h) = h^d f^(d)(x) + O(h^(len - d)).

    Solves the Vandermonde moment system sum_j w_j o_j^k / k! = delta_{kd}.
    """
    offsets_arr = np.asarray(offsets, dtype=float)
    count = len(offsets)
    moments = np.array([offsets_arr ** k / factorial(k) for k in range(count)])
    rhs = np.zeros(count)
    rhs[derivative] = 1.0
    return np.linalg.solve(moments, rhs)


class FiniteDifference:
    """
    Derivatives along the axes of a uniform tensor grid.

    Interior rows use the centred stencil; the first and last order/2 rows
    use one-sided stencils of order + 1 points so the nominal order holds up
    to the boundary. Periodic axes use the centred stencil with wrap-around.
    Arrays may carry extra leading axes (field components); grid axes are
    always the trailing ones.
    """

    def __init__(self, spacing: Sequence[float], points: Sequence[int], order: int = 4,
                 periodic: Optional[Sequence[bool]] = None):
        if order not in SUPPORTED_STENCIL_ORDERS:
            raise GridError(f"Stencil order {order} not in {SUPPORTED_STENCIL_ORDERS}")
        self.spacing = tuple(float(h) for h in spacing)
        self.points = tuple(int(p) for p in points)
        self.order = order
        self.periodic = tuple(periodic) if periodic is not None else (False,) * len(self.spacing)
        if not len(self.spacing) == len(self.points) == len(self.periodic):
            raise GridError("Spacing, points and periodic flags must have one entry per axis")
        for axis, count in enumerate(self.points):
            if count < order + 1:
                raise GridError(f"Axis {axis} has {count} points; order {order} stencils need {order + 1}")

        half = order // 2
        self._central_offsets = tuple(range(-half, half + 1))
        self._central = stencil_weights(self._central_offsets)
        self._left = [(tuple(range(-i, order + 1 - i)), stencil_weights(tuple(range(-i, order + 1 - i))))
                      for i in range(half)]
        # row count - half + j sits half - 1 - j points from the last node
        self._right = [(tuple(range(d - order, d + 1)), stencil_weights(tuple(range(d - order, d + 1))))
                       for d in range(half - 1, -1, -1)]

    @property
    def ndim(self) -> int:
        return len(self.spacing)

    def diff(self, values: np.ndarray, axis: int) -> np.ndarray:
        """
        First derivative of values along grid axis `axis`.

        Args:
            values: array whose trailing ndim axes are the grid axes
            axis: grid axis index

        Returns:
            np.ndarray: derivative with the shape of values
        """
        if not 0 <= axis < self.ndim:
            raise GridError(f"Axis {axis} outside 0..{self.ndim - 1}")
        values = np.asarray(values, dtype=float)
        array_axis = values.ndim - self.ndim + axis
        if values.shape[array_axis] != self.points[axis]:
            raise GridError(f"Array has {values.shape[array_axis]} points on axis {axis}, "
                            f"grid has {self.points[axis]}")
        work = np.moveaxis(values, array_axis, 0)
        if self.periodic[axis]:
            out = np.zeros_like(work)
            for offset, weight in zip(self._central_offsets, self._central):
                if weight != 0.0:
                    out += weight * np.roll(work, -offset, axis=0)
        else:
            out = self._diff_bounded(work)
        return np.moveaxis(out, 0, array_axis) / self.spacing[axis]

    def _diff_bounded(self, work: np.ndarray) -> np.ndarray:
        count = work.shape[0]
        half = self.order // 2
        out = np.zeros_like(work)
        for offset, weight in zip(self._central_offsets, self._central):
            if weight != 0.0:
                out[half:count - half] += weight * work[half + offset:count - half + offset]
        for row, (offsets, weights) in enumerate(self._left):
            out[row] = sum(w * work[row + o] for o, w in zip(offsets, weights))
        for row, (offsets, weights) in enumerate(self._right):
            index = count - half + row
            out[index] = sum(w * work[index + o] for o, w in zip(offsets, weights))
        return out
