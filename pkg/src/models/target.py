"""
TargetGeometry for the HeisenBH subelliptic geometry engine.
Riemannian target (N, h) in a single chart: flat space or the round unit sphere.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from config.settings import Config
from config.constants import FD_ORACLE_STEP
from .errors import ChartOverflowError, NonFiniteError


class TargetKind(Enum):
    """Supported target manifolds."""
    FLAT = "flat"
    ROUND_SPHERE = "round_sphere"


@dataclass(frozen=True)
class TargetGeometry:
    """
    Target metric, Christoffel symbols and curvature in chart coordinates.

    Chart points carry the component axis first: shape (nu, ...). All
    tensor outputs put their tensor indices first and broadcast over the
    remaining axes, so grid-valued maps and single points share one code path.
    The sphere uses stereographic coordinates, h = 4 delta / (1 + |y|^2)^2.
    """

    nu: int = Config.TARGET_DIMENSION
    kind: Union[TargetKind, str] = TargetKind.FLAT
    chart_bound: float = Config.CHART_BOUND

    def __post_init__(self):
        object.__setattr__(self, 'kind', TargetKind(self.kind))
        if int(self.nu) != self.nu or self.nu < 1:
            raise ValueError(f"Target dimension must be a positive integer, got {self.nu}")
        if not self.chart_bound > 0:
            raise ValueError(f"Chart bound must be positive, got {self.chart_bound}")

    @classmethod
    def flat(cls, nu: int) -> 'TargetGeometry':
        return cls(nu=nu, kind=TargetKind.FLAT, chart_bound=np.inf)

    @classmethod
    def sphere(cls, nu: int, chart_bound: float = Config.CHART_BOUND) -> 'TargetGeometry':
        return cls(nu=nu, kind=TargetKind.ROUND_SPHERE, chart_bound=chart_bound)

    @property
    def is_flat(self) -> bool:
        return self.kind is TargetKind.FLAT

    def _chart_points(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape[0] != self.nu:
            raise ValueError(f"Chart point must have {self.nu} components, got {y.shape[0]}")
        return y

    def chart_norm(self, y) -> np.ndarray:
        y = self._chart_points(y)
        return np.sqrt(np.sum(y ** 2, axis=0))

    def check_chart(self, y) -> float:
        """
        Validate chart values and return their largest norm.

        Raises:
            NonFiniteError: if any value is NaN or infinite
            ChartOverflowError: if a sphere chart norm reaches chart_bound
        """
        y = self._chart_points(y)
        if not np.all(np.isfinite(y)):
            raise NonFiniteError("Chart values contain NaN or infinity")
        norm = float(np.max(self.chart_norm(y))) if y.size else 0.0
        if not self.is_flat and norm >= self.chart_bound:
            raise ChartOverflowError(norm, self.chart_bound)
        return norm

    def _identity(self, y: np.ndarray) -> np.ndarray:
        eye = np.eye(self.nu).reshape((self.nu, self.nu) + (1,) * (y.ndim - 1))
        return np.broadcast_to(eye, (self.nu, self.nu) + y.shape[1:])

    def _conformal_factor(self, y: np.ndarray) -> np.ndarray:
        return 1.0 + np.sum(y ** 2, axis=0)

    def metric(self, y) -> np.ndarray:
        """Metric h_{jk}(y), shape (nu, nu, ...)."""
        y = self._chart_points(y)
        self.check_chart(y)
        if self.is_flat:
            return self._identity(y).copy()
        return self._identity(y) * (4.0 / self._conformal_factor(y) ** 2)

    def metric_inverse(self, y) -> np.ndarray:
        y = self._chart_points(y)
        self.check_chart(y)
        if self.is_flat:
            return self._identity(y).copy()
        return self._identity(y) * (self._conformal_factor(y) ** 2 / 4.0)

    def christoffel(self, y) -> np.ndarray:
        """
        Christoffel symbols Gamma^i_{jk}(y), indexed [i, j, k, ...].

        For h = e^{2f} delta with f = log 2 - log(1 + |y|^2):
        Gamma^i_{jk} = delta_ij f_k + delta_ik f_j - delta_jk f_i.
        """
        y = self._chart_points(y)
        self.check_chart(y)
        shape = (self.nu,) * 3 + y.shape[1:]
        if self.is_flat:
            return np.zeros(shape)
        df = -2.0 * y / self._conformal_factor(y)
        eye = self._identity(y)
        return (np.einsum('ij...,k...->ijk...', eye, df)
                + np.einsum('ik...,j...->ijk...', eye, df)
                - np.einsum('jk...,i...->ijk...', eye, df))

    def christoffel_derivative(self, y) -> np.ndarray:
        """Chart derivatives d Gamma^i_{jk} / d y^l, indexed [i, j, k, l, ...]."""
        y = self._chart_points(y)
        self.check_chart(y)
        shape = (self.nu,) * 4 + y.shape[1:]
        if self.is_flat:
            return np.zeros(shape)
        q = self._conformal_factor(y)
        eye = self._identity(y)
        hess = -2.0 * eye / q + 4.0 * np.einsum('k...,l...->kl...', y, y) / q ** 2
        return (np.einsum('ij...,kl...->ijkl...', eye, hess)
                + np.einsum('ik...,jl...->ijkl...', eye, hess)
                - np.einsum('jk...,il...->ijkl...', eye, hess))

    def _assemble_riemann(self, gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
        # R^m_{lkj} = d_l G^m_{kj} - d_k G^m_{lj} + G^i_{kj} G^m_{li} - G^i_{lj} G^m_{ki}
        return (np.einsum('mkjl...->mlkj...', dgamma)
                - np.einsum('mljk...->mlkj...', dgamma)
                + np.einsum('ikj...,mli...->mlkj...', gamma, gamma)
                - np.einsum('ilj...,mki...->mlkj...', gamma, gamma))

    def riemann(self, y) -> np.ndarray:
        """Curvature components R^m_{lkj}(y), indexed [m, l, k, j, ...]."""
        return self._assemble_riemann(self.christoffel(y), self.christoffel_derivative(y))

    def curvature(self, y, u, v, w) -> np.ndarray:
        """R(u, v) w = R^m_{lkj} u^l v^k w^j; for the unit sphere h(v, w) u - h(u, w) v."""
        return np.einsum('mlkj...,l...,k...,j...->m...', self.riemann(y),
                         np.asarray(u, dtype=float), np.asarray(v, dtype=float), np.asarray(w, dtype=float))

    # Finite-difference oracles, single chart point

    def _central_difference(self, func, y: np.ndarray, step: float) -> np.ndarray:
        slices = []
        for ell in range(self.nu):
            shift = np.zeros(self.nu)
            shift[ell] = step
            slices.append((func(y + shift) - func(y - shift)) / (2.0 * step))
        return np.stack(slices, axis=-1)

    def christoffel_fd_oracle(self, y, step: float = FD_ORACLE_STEP) -> np.ndarray:
        """Gamma^i_{jk} = 1/2 h^{il}(d_j h_{lk} + d_k h_{lj} - d_l h_{jk}) from differenced metric."""
        y = self._chart_points(y).reshape(self.nu)
        dh = np.moveaxis(self._central_difference(self.metric, y, step), -1, 0)  # [l, j, k]
        lowered = 0.5 * (np.einsum('jlk->ljk', dh) + np.einsum('klj->ljk', dh) - dh)
        return np.einsum('il,ljk->ijk', self.metric_inverse(y), lowered)

    def curvature_fd_oracle(self, y, u, v, w, step: float = FD_ORACLE_STEP) -> np.ndarray:
        y = self._chart_points(y).reshape(self.nu)
        dgamma = self._central_difference(self.christoffel, y, step)
        riemann = self._assemble_riemann(self.christoffel(y), dgamma)
        return np.einsum('mlkj,l,k,j->m', riemann, u, v, w)

    def to_dict(self):
        return {
            'nu': self.nu,
            'kind': self.kind.value,
            'chart_bound': float(self.chart_bound),
        }
