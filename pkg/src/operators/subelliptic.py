"""
SubellipticCalculus for the HeisenBH subelliptic geometry engine.
Sublaplacian, pullback connection, tension field, rough sublaplacian and the
subelliptic biharmonic operator on a grid over H_n.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from fields.fields import (
    HorizontalField,
    MapField,
    ScalarField,
    SectionField,
    apply_coordinate_derivative,
    apply_frame_derivative,
)
from fields.grid import GridSpec
from models.errors import GridError
from models.heisenberg import HeisenbergModel


@dataclass(frozen=True)
class Direction:
    """Differentiation direction: a frame field X~_a (1-based) or a coordinate axis (0-based)."""

    kind: str
    index: int

    @classmethod
    def frame(cls, a: int) -> 'Direction':
        return cls('frame', a)

    @classmethod
    def axis(cls, axis: int) -> 'Direction':
        return cls('axis', axis)


DirectionLike = Union[Direction, int]


class SubellipticCalculus:
    """
    Differential operators of the pseudohermitian geometry of H_n on one grid.

    Public operations take and return field objects; the underscored helpers
    work on raw arrays whose trailing axes are the grid axes. The
    Tanaka-Webster connection is flat on H_n, so every nabla_{X_a} X_a term is
    carried through `_frame_self_covariant`, which returns zero coefficients.
    """

    def __init__(self, model: HeisenbergModel, grid: GridSpec):
        if model.n != grid.n:
            raise GridError(f"Model has n={model.n}, grid has n={grid.n}")
        self.model = model
        self.grid = grid
        self.logger = logging.getLogger(__name__)

    @property
    def frame_indices(self) -> range:
        return range(1, 2 * self.model.n + 1)

    # Array-level primitives

    def _frame(self, values: np.ndarray, a: int) -> np.ndarray:
        return apply_frame_derivative(values, self.grid, self.model, a)

    def _derivative(self, values: np.ndarray, direction: DirectionLike) -> np.ndarray:
        direction = direction if isinstance(direction, Direction) else Direction.frame(direction)
        if direction.kind == 'frame':
            return self._frame(values, direction.index)
        if direction.kind == 'axis':
            return apply_coordinate_derivative(values, self.grid, direction.index)
        raise ValueError(f"Unknown direction kind '{direction.kind}'")

    def _frame_self_covariant(self, a: int) -> np.ndarray:
        """Frame coefficients of nabla_{X~_a} X~_a (Tanaka-Webster); zero on H_n."""
        return np.zeros((2 * self.model.n,) + self.grid.shape)

    def _along_horizontal(self, values: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
        """Y(values) for Y = sum_b c_b X~_b."""
        out = np.zeros_like(values)
        for b in self.frame_indices:
            if np.any(coefficients[b - 1]):
                out += coefficients[b - 1] * self._frame(values, b)
        return out

    def _sublaplacian_array(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros_like(values)
        for a in self.frame_indices:
            out += self._frame(self._frame(values, a), a)
            out -= self._along_horizontal(values, self._frame_self_covariant(a))
        return out

    def _connect(self, base_map: MapField, dv: np.ndarray, dphi: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Pullback connection in components: X(V^i) + X(phi^j) V^k Gamma^i_jk(phi)."""
        return dv + np.einsum('ijk...,j...,k...->i...', base_map.christoffel(), dphi, v)

    def _covariant(self, base_map: MapField, v: np.ndarray, direction: DirectionLike) -> np.ndarray:
        return self._connect(base_map, self._derivative(v, direction),
                             self._derivative(base_map.values, direction), v)

    def _covariant_along_horizontal(self, base_map: MapField, v: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        for b in self.frame_indices:
            if np.any(coefficients[b - 1]):
                out += coefficients[b - 1] * self._covariant(base_map, v, b)
        return out

    def _frame_differentials(self, phi: MapField) -> List[np.ndarray]:
        return [self._frame(phi.values, a) for a in self.frame_indices]

    # Scalar operators

    def horizontal_gradient(self, u: ScalarField) -> HorizontalField:
        """Coefficients X~_a(u) of grad_H u."""
        return HorizontalField(self.grid, np.stack([self._frame(u.values, a) for a in self.frame_indices]))

    def sublaplacian(self, u: ScalarField) -> ScalarField:
        """Delta_b u = sum_a {X~_a^2 u - (nabla_{X~_a} X~_a) u}."""
        return ScalarField(self.grid, self._sublaplacian_array(u.values))

    def bi_sublaplacian(self, u: ScalarField) -> ScalarField:
        return self.sublaplacian(self.sublaplacian(u))

    def hormander_operator(self, u: ScalarField) -> ScalarField:
        """H = sum_a X~_a^* X~_a = -sum_a X~_a^2 (X~_a^* = -X~_a on H_n)."""
        out = np.zeros_like(u.values)
        for a in self.frame_indices:
            out -= self._frame(self._frame(u.values, a), a)
        return ScalarField(self.grid, out)

    def divergence(self, y: HorizontalField) -> ScalarField:
        """Divergence against Psi; the frame fields are divergence free on H_n."""
        out = np.zeros(self.grid.shape)
        for a in self.frame_indices:
            out += self._frame(y.coefficients[a - 1], a)
        return ScalarField(self.grid, out)

    # Pullback bundle

    def pushforward(self, phi: MapField, direction: DirectionLike) -> SectionField:
        """phi_* X with components X(phi^i)."""
        return SectionField(self.grid, self._derivative(phi.values, direction), phi)

    def pullback_connection(self, phi: MapField, v: SectionField, direction: DirectionLike) -> SectionField:
        """(phi^{-1} nabla^h)_X V."""
        return v.with_components(self._covariant(phi, v.components, direction))

    def covariant_along(self, phi: MapField, v: SectionField, y: HorizontalField) -> SectionField:
        """(phi^{-1} nabla^h)_Y V for a horizontal field Y."""
        return v.with_components(self._covariant_along_horizontal(phi, v.components, y.coefficients))

    def second_fundamental_form(self, phi: MapField, a: int, b: int) -> SectionField:
        """beta_b(phi)(X~_a, X~_b) = nabla_{X~_a} phi_* X~_b - phi_* (nabla_{X~_a} X~_b)."""
        pushed = self._frame(phi.values, b)
        out = self._connect(phi, self._frame(pushed, a), self._frame(phi.values, a), pushed)
        # nabla_{X~_a} X~_b vanishes for the left-invariant frame
        return SectionField(self.grid, out, phi)

    def tension_field(self, phi: MapField, route: str = 'frame') -> SectionField:
        """
        Subelliptic tension field tau_b(phi).

        Args:
            phi: map into the target
            route: 'frame' for Delta_b phi^i + X~_a phi^j X~_a phi^k Gamma^i_jk,
                'trace' for the trace of the second fundamental form

        Returns:
            SectionField: tau_b(phi) over phi
        """
        if route == 'trace':
            out = np.zeros_like(phi.values)
            for a in self.frame_indices:
                out += self.second_fundamental_form(phi, a, a).components
            return SectionField(self.grid, out, phi)
        if route != 'frame':
            raise ValueError(f"Unknown tension route '{route}'")
        out = self._sublaplacian_array(phi.values)
        gamma = phi.christoffel()
        for dphi in self._frame_differentials(phi):
            out += np.einsum('ijk...,j...,k...->i...', gamma, dphi, dphi)
        return SectionField(self.grid, out, phi)

    def pushforward_contraction(self, phi: MapField) -> np.ndarray:
        """sum_a X~_a(phi^j) X~_a(phi^k), shape (nu, nu, *grid.shape)."""
        dphis = self._frame_differentials(phi)
        return sum(np.einsum('j...,k...->jk...', d, d) for d in dphis)

    # Rough sublaplacian

    def rough_sublaplacian(self, phi: MapField, v: SectionField, route: str = 'frame') -> SectionField:
        """
        Delta_b^phi V.

        Args:
            route: 'frame' nests the pullback connection,
                sum_a {nabla_{X~_a} nabla_{X~_a} V - nabla_{nabla_{X~_a} X~_a} V};
                'local' evaluates the expanded coordinate formula term by term

        Returns:
            SectionField: Delta_b^phi V over phi
        """
        if route == 'frame':
            out = np.zeros_like(v.components)
            for a in self.frame_indices:
                first = self.pullback_connection(phi, v, a)
                out += self.pullback_connection(phi, first, a).components
                out -= self._covariant_along_horizontal(phi, v.components, self._frame_self_covariant(a))
            return v.with_components(out)
        if route == 'local':
            dphis = self._frame_differentials(phi)
            out = (self._local_laplacian_term(v)
                   + self._local_cross_term(phi, v, dphis)
                   + self._local_gamma_term(phi, v)
                   + self._local_quadratic_term(phi, v, dphis))
            return v.with_components(out)
        raise ValueError(f"Unknown rough sublaplacian route '{route}'")

    def _local_laplacian_term(self, v: SectionField) -> np.ndarray:
        return self._sublaplacian_array(v.components)

    def _local_cross_term(self, phi: MapField, v: SectionField, dphis: Sequence[np.ndarray]) -> np.ndarray:
        # 2 X_a(phi^j) Gamma^i_jk X_a(V^k)
        gamma = phi.christoffel()
        out = np.zeros_like(v.components)
        for a, dphi in zip(self.frame_indices, dphis):
            out += 2.0 * np.einsum('ijk...,j...,k...->i...', gamma, dphi, self._frame(v.components, a))
        return out

    def _local_gamma_term(self, phi: MapField, v: SectionField) -> np.ndarray:
        # Gamma^i_jk Delta_b(phi^j) V^k
        return np.einsum('ijk...,j...,k...->i...', phi.christoffel(),
                         self._sublaplacian_array(phi.values), v.components)

    def _local_quadratic_term(self, phi: MapField, v: SectionField, dphis: Sequence[np.ndarray]) -> np.ndarray:
        # X_a(phi^j) X_a(phi^l) (d_l Gamma^i_jk + Gamma^s_kl Gamma^i_js) V^k
        gamma = phi.christoffel()
        coefficient = (phi.target.christoffel_derivative(phi.values)
                       + np.einsum('skl...,ijs...->ijkl...', gamma, gamma))
        contraction = sum(np.einsum('j...,l...->jl...', d, d) for d in dphis)
        return np.einsum('ijkl...,jl...,k...->i...', coefficient, contraction, v.components)

    def horizontal_derivative(self, phi: MapField, v: SectionField) -> List[SectionField]:
        """D V = ((phi^{-1} nabla^h)_{X~_a} V)_a."""
        return [self.pullback_connection(phi, v, a) for a in self.frame_indices]

    def d_star(self, phi: MapField, theta: Sequence[SectionField]) -> SectionField:
        """Formal adjoint D*: -sum_a {nabla_{X~_a} Theta_a - Theta(nabla_{X~_a} X~_a)}."""
        if len(theta) != 2 * self.model.n:
            raise ValueError(f"D* needs {2 * self.model.n} sections, got {len(theta)}")
        out = np.zeros_like(phi.values)
        for a in self.frame_indices:
            out -= self._covariant(phi, theta[a - 1].components, a)
            hook = self._frame_self_covariant(a)
            for b in self.frame_indices:
                out += hook[b - 1] * theta[b - 1].components
        return SectionField(self.grid, out, phi)

    def self_adjointness_field(self, phi: MapField, v: SectionField, w: SectionField) -> HorizontalField:
        """X = sum_a [h(nabla_a V, W) - h(V, nabla_a W)] X~_a, whose divergence is h(Lap V, W) - h(V, Lap W)."""
        h = phi.metric()
        coefficients = []
        for a in self.frame_indices:
            dv = self._covariant(phi, v.components, a)
            dw = self._covariant(phi, w.components, a)
            coefficients.append(np.einsum('ij...,i...,j...->...', h, dv, w.components)
                                - np.einsum('ij...,i...,j...->...', h, v.components, dw))
        return HorizontalField(self.grid, np.stack(coefficients))

    # Symbol

    def principal_symbol(self, phi: MapField, index: Tuple[int, ...], omega, v, route: str = 'closed') -> np.ndarray:
        """
        sigma_2(Delta_b^phi)_omega v at the grid point `index`.

        Args:
            index: grid multi-index of the point x
            omega: covector at x in coordinate components
            v: fiber vector at x, nu components
            route: 'closed' for [omega(T)^2 - |omega|^2] v, 'defining' for
                -1/2 Delta_b^phi[(f - f(x))^2 V](x) with df_x = omega

        Raises:
            ValueError: if omega is the zero covector
        """
        omega = np.asarray(omega, dtype=float)
        v = np.asarray(v, dtype=float)
        if not np.any(omega):
            raise ValueError("Principal symbol needs a nonzero covector")
        point = np.array([self.grid.mesh[axis][index] for axis in range(self.grid.dim)])
        if route == 'closed':
            reeb = float(omega @ self.model.reeb_vector(point))
            return (reeb ** 2 - float(self.model.dual_norm_sq(point, omega))) * v
        if route != 'defining':
            raise ValueError(f"Unknown symbol route '{route}'")
        linear = sum(omega[axis] * (self.grid.mesh[axis] - point[axis]) for axis in range(self.grid.dim))
        components = (linear ** 2)[None] * v.reshape((-1,) + (1,) * self.grid.dim)
        section = SectionField(self.grid, components, phi)
        result = self.rough_sublaplacian(phi, section, route='frame').components
        return -0.5 * result[(slice(None),) + tuple(index)]

    # Biharmonic operator

    def curvature_trace_term(self, phi: MapField, w: SectionField) -> SectionField:
        """sum_a R^h(W, phi_* X~_a) phi_* X~_a."""
        riemann = phi.target.riemann(phi.values)
        out = np.einsum('mlkj...,l...,kj...->m...', riemann, w.components, self.pushforward_contraction(phi))
        return w.with_components(out)

    def bh_operator(self, phi: MapField) -> SectionField:
        """BH_b(phi) = Delta_b^phi tau_b(phi) + sum_a R^h(tau_b, phi_* X~_a) phi_* X~_a."""
        tau = self.tension_field(phi)
        return self.rough_sublaplacian(phi, tau) + self.curvature_trace_term(phi, tau)
