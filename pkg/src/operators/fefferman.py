"""
FeffermanLift for the HeisenBH subelliptic geometry engine.
Fefferman metric on C(M) = H_n x S^1, wave operator, lifts of maps and sections,
and the residuals of the lift identities.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.settings import Config
from config.constants import ENERGY_FLOOR, LIFTED_DTHETA_FACTOR, LIFTED_REEB_DIVISOR
from fields.fields import MapField, ScalarField, SectionField, integrate_array, l2_inner
from fields.finite_difference import FiniteDifference
from fields.grid import GridSpec
from models.errors import GridError
from models.heisenberg import HeisenbergModel
from .subelliptic import SubellipticCalculus


@dataclass(frozen=True)
class CircleGrid:
    """Uniform periodic samples gamma_k = 2 pi k / points of the fiber S^1."""

    points: int = Config.FIBER_POINTS

    def __post_init__(self):
        if int(self.points) != self.points or self.points < 3:
            raise GridError(f"Fiber needs at least 3 points, got {self.points}")

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.points

    @property
    def gamma(self) -> np.ndarray:
        return np.arange(self.points) * self.spacing

    def quadrature_weight(self) -> float:
        """Rectangle-rule weight, exact for trigonometric integrands of low degree."""
        return 2.0 * math.pi / self.points


@dataclass(frozen=True, eq=False)
class FeffermanMetric:
    """
    Fefferman metric sampled at base points (it does not depend on gamma).

    Arrays are point-major: matrix and inverse have shape (..., 2n+2, 2n+2).
    `frame_lambda` holds lambda_A^B of the CR frame decomposition and
    `reeb_covector` the real row lambda^0_A = theta(d/dx^A).
    """

    n: int
    matrix: np.ndarray
    inverse: np.ndarray
    determinant: np.ndarray
    frame_lambda: np.ndarray
    reeb_covector: np.ndarray

    @property
    def dim(self) -> int:
        return 2 * self.n + 2

    def signature(self) -> Tuple[np.ndarray, np.ndarray]:
        """Counts of positive and negative eigenvalues at each sample."""
        eigenvalues = np.linalg.eigvalsh(self.matrix)
        return np.sum(eigenvalues > 0, axis=-1), np.sum(eigenvalues < 0, axis=-1)

    def is_lorentzian(self) -> bool:
        positive, negative = self.signature()
        return bool(np.all(negative == 1) and np.all(positive == self.dim - 1))


@dataclass(frozen=True, eq=False)
class LiftedField:
    """Values over base grid x fiber; trailing axes (*grid.shape, circle.points)."""

    grid: GridSpec
    circle: CircleGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=float))
        expected = self.grid.shape + (self.circle.points,)
        if self.values.shape[-len(expected):] != expected:
            raise GridError(f"Lifted field has shape {self.values.shape}, trailing axes must be {expected}")

    def fiber_variation(self) -> float:
        """Largest spread of values along the fiber."""
        return float(np.max(np.ptp(self.values, axis=-1))) if self.values.size else 0.0


LiftedScalar = LiftedField
LiftedSection = LiftedField


class FeffermanLift:
    """
    Lift calculus on the trivial circle bundle over a grid box of H_n.

    On the flat model sigma = d gamma / (n+2) and F = G~ + theta (x) sigma + sigma (x) theta
    in coordinates (x, y, t, gamma). Fields on C(M) are differentiated with the
    base stencils plus a periodic stencil along gamma.
    """

    def __init__(self, model: HeisenbergModel, grid: GridSpec, circle: Optional[CircleGrid] = None,
                 calculus: Optional[SubellipticCalculus] = None):
        self.model = model
        self.grid = grid
        self.circle = circle if circle is not None else CircleGrid()
        self.calculus = calculus if calculus is not None else SubellipticCalculus(model, grid)
        self.fd = FiniteDifference(grid.spacing + (self.circle.spacing,), grid.points + (self.circle.points,),
                                   grid.stencil_order, periodic=(False,) * grid.dim + (True,))
        self.logger = logging.getLogger(__name__)

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def m(self) -> int:
        """Index of the fiber coordinate (= dimension of H_n)."""
        return self.model.dim

    # Metric

    def _connection_form_hook(self, lam: np.ndarray) -> np.ndarray:
        """
        Base components of sigma beyond d gamma / (n+2).

        The terms i omega^alpha_alpha, g^{alpha betabar} d g_{alpha betabar} and the
        Webster scalar curvature all vanish on H_n.
        """
        return np.zeros(lam.shape[:-1])

    def assemble_fefferman(self, points) -> FeffermanMetric:
        """
        F_{AB} = G~(d_A, d_B) + theta(d_A) sigma(d_B) + theta(d_B) sigma(d_A),
        F_{A,gamma} = lambda^0_A / (n+2), F_{gamma,gamma} = 0.

        Args:
            points: base points (..., 2n+1) or C(M) points (..., 2n+2); gamma is ignored
        """
        points = np.asarray(points, dtype=float)
        if points.shape[-1] == self.m + 1:
            points = points[..., :self.m]
        n, m = self.n, self.m
        lam, _ = self.model.frame_decomposition(points)
        levi = self.model.levi_matrix()
        holomorphic = lam[..., :, 1:n + 1]
        antiholomorphic = lam[..., :, n + 1:]
        reeb = lam[..., :, 0]
        sigma = self._connection_form_hook(lam)
        levi_part = (np.einsum('...Aa,ab,...Bb->...AB', holomorphic, levi, antiholomorphic)
                     + np.einsum('...Ba,ab,...Ab->...AB', holomorphic, levi, antiholomorphic))
        base_block = (levi_part + reeb[..., :, None] * sigma[..., None, :]
                      + sigma[..., :, None] * reeb[..., None, :])
        imaginary = float(np.max(np.abs(base_block.imag))) if base_block.size else 0.0
        if imaginary > 1e-10:
            self.logger.warning(f"Fefferman base block has imaginary part {imaginary:.3e}")

        matrix = np.zeros(points.shape[:-1] + (m + 1, m + 1))
        matrix[..., :m, :m] = base_block.real
        matrix[..., :m, m] = reeb.real / (n + 2)
        matrix[..., m, :m] = reeb.real / (n + 2)
        return FeffermanMetric(
            n=n,
            matrix=matrix,
            inverse=np.linalg.inv(matrix),
            determinant=np.linalg.det(matrix),
            frame_lambda=lam,
            reeb_covector=reeb.real,
        )

    @cached_property
    def grid_metric(self) -> FeffermanMetric:
        return self.assemble_fefferman(self.grid.point_array())

    @cached_property
    def _inverse_field(self) -> np.ndarray:
        """F^{pq} component-first with a unit fiber axis, (2n+2, 2n+2, *grid.shape, 1)."""
        return np.moveaxis(self.grid_metric.inverse, (-2, -1), (0, 1))[..., None]

    @cached_property
    def _sqrt_det_field(self) -> np.ndarray:
        return np.sqrt(np.abs(self.grid_metric.determinant))[..., None]

    @cached_property
    def christoffel_field(self) -> np.ndarray:
        """
        Levi-Civita symbols Gamma^r_{pq} of F from differenced metric samples.

        The samples do not depend on gamma, so only base derivatives are taken.
        Shape (2n+2, 2n+2, 2n+2, *grid.shape, 1).
        """
        m = self.m
        metric = np.moveaxis(self.grid_metric.matrix, (-2, -1), (0, 1))
        inverse = np.moveaxis(self.grid_metric.inverse, (-2, -1), (0, 1))
        derivative = np.zeros((m + 1,) + metric.shape)
        for p in range(m):
            derivative[p] = self.grid.finite_difference.diff(metric, p)
        lowered = 0.5 * (np.einsum('psq...->spq...', derivative) + np.einsum('qsp...->spq...', derivative)
                         - derivative)
        return np.einsum('rs...,spq...->rpq...', inverse, lowered)[..., None]

    def inverse_identities_check(self, metric: Optional[FeffermanMetric] = None) -> Dict[str, float]:
        """Residuals of F^{-1} F = I split into its base/fiber blocks against lambda^0."""
        metric = metric if metric is not None else self.grid_metric
        n, m = self.n, self.m
        inv, mat, reeb = metric.inverse, metric.matrix, metric.reeb_covector
        eye = np.eye(m)
        frame_inverse = (np.einsum('...AB,...BC->...AC', inv[..., :m, :m], mat[..., :m, :m])
                         + inv[..., :m, m][..., :, None] * reeb[..., None, :] / (n + 2) - eye)
        reeb_kernel = np.einsum('...AB,...B->...A', inv[..., :m, :m], reeb)
        fiber_row = (np.einsum('...B,...BC->...C', inv[..., m, :m], mat[..., :m, :m])
                     + inv[..., m, m][..., None] * reeb / (n + 2))
        fiber_normalization = np.einsum('...B,...B->...', inv[..., m, :m], reeb) - (n + 2)
        full = inv @ mat - np.eye(m + 1)
        return {
            'frame_inverse': float(np.max(np.abs(frame_inverse))),
            'reeb_kernel': float(np.max(np.abs(reeb_kernel))),
            'fiber_row': float(np.max(np.abs(fiber_row))),
            'fiber_normalization': float(np.max(np.abs(fiber_normalization))),
            'full_inverse': float(np.max(np.abs(full))),
        }

    def reciprocal_levi_check(self, metric: Optional[FeffermanMetric] = None) -> Dict[str, float]:
        """F^{AB} lambda_A^alpha lambda_B^betabar = g^{alpha betabar} and F^{AB} lambda_A^alpha lambda_B^beta = 0."""
        metric = metric if metric is not None else self.grid_metric
        n, m = self.n, self.m
        base_inverse = metric.inverse[..., :m, :m]
        holomorphic = metric.frame_lambda[..., :, 1:n + 1]
        antiholomorphic = metric.frame_lambda[..., :, n + 1:]
        levi_inverse = np.linalg.inv(self.model.levi_matrix()).T
        mixed = np.einsum('...AB,...Aa,...Bb->...ab', base_inverse, holomorphic, antiholomorphic) - levi_inverse
        pure = np.einsum('...AB,...Aa,...Bb->...ab', base_inverse, holomorphic, holomorphic)
        return {
            'mixed': float(np.max(np.abs(mixed))),
            'pure': float(np.max(np.abs(pure))),
        }

    # Lifts

    def _lift_array(self, values: np.ndarray) -> np.ndarray:
        return np.repeat(np.asarray(values, dtype=float)[..., None], self.circle.points, axis=-1)

    def lift_scalar(self, u: ScalarField) -> LiftedField:
        return LiftedField(self.grid, self.circle, self._lift_array(u.values))

    def lift_map(self, phi: MapField) -> LiftedField:
        return LiftedField(self.grid, self.circle, self._lift_array(phi.values))

    def lift_section(self, v: SectionField) -> LiftedField:
        return LiftedField(self.grid, self.circle, self._lift_array(v.components))

    def _interior_max(self, pointwise: np.ndarray, fraction: float) -> float:
        mask = self.grid.interior_mask(fraction)
        return float(np.max(pointwise[mask])) if np.any(mask) else 0.0

    # Wave operator and tension

    def _gradient(self, values: np.ndarray) -> List[np.ndarray]:
        return [self.fd.diff(values, p) for p in range(self.m + 1)]

    def wave_operator(self, u: LiftedField) -> LiftedField:
        """Box U = |det F|^{-1/2} d_p (|det F|^{1/2} F^{pq} d_q U)."""
        grads = self._gradient(u.values)
        inverse, root = self._inverse_field, self._sqrt_det_field
        out = np.zeros_like(u.values)
        for p in range(self.m + 1):
            flux = sum(root * inverse[p, q] * grads[q] for q in range(self.m + 1))
            out += self.fd.diff(flux, p)
        return LiftedField(self.grid, self.circle, out / root)

    def lee_identity_residual(self, u: ScalarField, fraction: float = Config.VERIFY_INTERIOR_FRACTION) -> float:
        """max over the interior of |Box(u o pi) - (Delta_b u) o pi|."""
        wave = self.wave_operator(self.lift_scalar(u)).values
        base = self._lift_array(self.calculus.sublaplacian(u).values)
        return self._interior_max(np.max(np.abs(wave - base), axis=-1), fraction)

    def lifted_contraction(self, phi_lift: np.ndarray) -> np.ndarray:
        """F^{pq} d_p Phi^j d_q Phi^k, shape (nu, nu, *grid.shape, fiber)."""
        grads = self._gradient(phi_lift)
        inverse = self._inverse_field
        out = 0.0
        for p in range(self.m + 1):
            for q in range(self.m + 1):
                if np.any(inverse[p, q]):
                    out = out + inverse[p, q] * np.einsum('j...,k...->jk...', grads[p], grads[q])
        return out

    def tension_lift(self, phi: MapField) -> LiftedField:
        """tau(Phi)^i = Box Phi^i + Gamma^i_jk(Phi) d_p Phi^j d_q Phi^k F^{pq}, computed on C(M)."""
        lifted = self.lift_map(phi)
        gamma = phi.target.christoffel(lifted.values)
        out = (self.wave_operator(lifted).values
               + np.einsum('ijk...,jk...->i...', gamma, self.lifted_contraction(lifted.values)))
        return LiftedField(self.grid, self.circle, out)

    def _lifted_norm(self, phi: MapField, difference: np.ndarray) -> np.ndarray:
        metric = self._lift_array(phi.metric())
        return np.sqrt(np.maximum(np.einsum('ij...,i...,j...->...', metric, difference, difference), 0.0))

    def tension_lift_residual(self, phi: MapField, fraction: float = Config.VERIFY_INTERIOR_FRACTION) -> float:
        """max over the interior of |tau(phi o pi) - tau_b(phi) o pi|_h."""
        difference = (self.tension_lift(phi).values
                      - self._lift_array(self.calculus.tension_field(phi).components))
        return self._interior_max(np.max(self._lifted_norm(phi, difference), axis=-1), fraction)

    def contraction_lift_residual(self, phi: MapField, fraction: float = Config.VERIFY_INTERIOR_FRACTION) -> float:
        """max |F^{pq} d_p Phi^j d_q Phi^k - sum_a X~_a(phi^j) X~_a(phi^k)| over the interior."""
        difference = (self.lifted_contraction(self.lift_map(phi).values)
                      - self._lift_array(self.calculus.pushforward_contraction(phi)))
        pointwise = np.max(np.abs(difference), axis=(0, 1, -1))
        return self._interior_max(pointwise, fraction)

    # Energy

    @property
    def volume_normalization(self) -> float:
        """Constant turning |det F|^{1/2} into the density of pi^* Psi ^ d gamma."""
        return float((self.n + 2) * math.factorial(self.n))

    def lifted_bienergy(self, tau_lift: np.ndarray, phi: MapField) -> float:
        """1/2 int_{C(M)} |tau|^2 dvol(F), fiber by the rectangle rule."""
        density = np.einsum('ij...,i...,j...->...', self._lift_array(phi.metric()), tau_lift, tau_lift)
        volume = self.volume_normalization * self._sqrt_det_field
        weights = self.grid.quadrature_weights[..., None] * self.circle.quadrature_weight()
        return 0.5 * float(np.sum(density * volume * weights))

    def energy_lift_ratio(self, phi: MapField, route: str = 'wave') -> Dict[str, Any]:
        """
        Ratio of the lifted bienergy to E_{2,b}(phi).

        Args:
            route: 'wave' integrates tau(Phi) computed on C(M) through the wave
                operator, 'lifted' integrates tau_b(phi) o pi

        Returns:
            Dict[str, Any]: ratio (None when E_{2,b} is below the floor), both
                energies and the measured density normalization
        """
        tau = self.calculus.tension_field(phi)
        base_energy = 0.5 * l2_inner(tau, tau)
        if route == 'lifted':
            tau_lift = self._lift_array(tau.components)
        elif route == 'wave':
            tau_lift = self.tension_lift(phi).values
        else:
            raise ValueError(f"Unknown energy route '{route}'")
        lifted_energy = self.lifted_bienergy(tau_lift, phi)
        density_ratio = self._sqrt_det_field * self.volume_normalization / self.model.volume_density
        ratio = None
        if abs(base_energy) < ENERGY_FLOOR:
            self.logger.warning(f"E_2b = {base_energy:.3e} below floor; energy ratio undefined")
        else:
            ratio = lifted_energy / base_energy
        return {
            'ratio': ratio,
            'lifted_energy': lifted_energy,
            'base_energy': base_energy,
            'raw_density_ratio': float(np.mean(self._sqrt_det_field)) / self.model.volume_density,
            'density_defect': float(np.max(np.abs(density_ratio - 1.0))),
        }

    # Lifted frames and the Levi-Civita connection of F

    def lifted_frame_field(self, name: str) -> np.ndarray:
        """
        Coordinate components on C(M) of X_a^up ('X1'..), T^up ('T'), S ('S'),
        T^up + S ('T+S') or T^up - S ('T-S'); shape (2n+2, *grid.shape, 1).
        """
        m = self.m
        out = np.zeros((m + 1,) + self.grid.shape + (1,))
        if name.startswith('X'):
            a = int(name[1:])
            frame = self.model.frame_vector(a, self.grid.point_array())
            out[:m] = np.moveaxis(frame, -1, 0)[..., None]
        elif name == 'T':
            out[m - 1] = 1.0
        elif name == 'S':
            out[m] = 0.5 * (self.n + 2)
        elif name in ('T+S', 'T-S'):
            sign = 1.0 if name == 'T+S' else -1.0
            out[m - 1] = 1.0
            out[m] = sign * 0.5 * (self.n + 2)
        else:
            raise ValueError(f"Unknown lifted frame field '{name}'")
        return out

    def _base_gradient(self, field: np.ndarray) -> List[np.ndarray]:
        # fiber-independent samples: the gamma derivative vanishes
        grads = [self.grid.finite_difference.diff(field[..., 0], p)[..., None] for p in range(self.m)]
        grads.append(np.zeros_like(field))
        return grads

    def covariant_derivative_fields(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """nabla^F_X Y for fiber-independent vector fields given by components."""
        grads = self._base_gradient(y)
        directional = sum(x[p] * grads[p] for p in range(self.m + 1))
        return directional + np.einsum('rpq...,p...,q...->r...', self.christoffel_field, x, y)

    def metric_pairing_fields(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        metric = np.moveaxis(self.grid_metric.matrix, (-2, -1), (0, 1))[..., None]
        return np.einsum('pq...,p...,q...->...', metric, x, y)

    def frame_normalization_constants(self) -> Dict[str, float]:
        """F(T^up + S, T^up + S) and F(T^up - S, T^up - S), with their spread over the grid."""
        plus = self.metric_pairing_fields(self.lifted_frame_field('T+S'), self.lifted_frame_field('T+S'))
        minus = self.metric_pairing_fields(self.lifted_frame_field('T-S'), self.lifted_frame_field('T-S'))
        return {
            'plus': float(np.mean(plus)),
            'minus': float(np.mean(minus)),
            'spread': float(max(np.ptp(plus), np.ptp(minus))),
        }

    def connection_constants(self) -> Dict[str, float]:
        """
        Coefficients in the closed forms for the lifted connection.

        `dtheta_factor` multiplies d theta(X, Y) T^up in nabla_{X^up} Y^up
        (alternation convention for 2-forms on C(M)); `reeb_factor` multiplies
        (JX)^up in nabla_{X^up} S and equals d theta(X~_alpha, X~_{n+alpha}) / 4.
        """
        origin = np.zeros(self.m)
        kappa = float(self.model.dtheta(self.model.frame_vector(1, origin),
                                        self.model.frame_vector(self.n + 1, origin)))
        return {'dtheta_factor': LIFTED_DTHETA_FACTOR, 'reeb_factor': kappa / LIFTED_REEB_DIVISOR}

    def connection_lift_expected(self, x_name: str, y_name: str) -> np.ndarray:
        """Closed-form nabla^F for pairs of lifted frame fields on the flat model."""
        constants = self.connection_constants()
        out = np.zeros((self.m + 1,) + self.grid.shape + (1,))
        horizontal_x = x_name.startswith('X')
        horizontal_y = y_name.startswith('X')
        if horizontal_x and horizontal_y:
            origin = np.zeros(self.m)
            dtheta = float(self.model.dtheta(self.model.frame_vector(int(x_name[1:]), origin),
                                             self.model.frame_vector(int(y_name[1:]), origin)))
            return -constants['dtheta_factor'] * dtheta * self.lifted_frame_field('T')
        if (horizontal_x and y_name == 'S') or (x_name == 'S' and horizontal_y):
            a = int((x_name if horizontal_x else y_name)[1:])
            rotated = a + self.n if a <= self.n else a - self.n
            sign = 1.0 if a <= self.n else -1.0
            return constants['reeb_factor'] * sign * self.lifted_frame_field(f"X{rotated}")
        return out

    def connection_lift_check(self, x_name: str, y_name: str,
                              fraction: float = Config.VERIFY_INTERIOR_FRACTION) -> float:
        """max interior residual of the numeric nabla^F_{X} Y against its closed form."""
        numeric = self.covariant_derivative_fields(self.lifted_frame_field(x_name), self.lifted_frame_field(y_name))
        difference = numeric - self.connection_lift_expected(x_name, y_name)
        return self._interior_max(np.max(np.abs(difference), axis=(0, -1)), fraction)

    def lifted_orthonormal_frame(self) -> List[Tuple[str, np.ndarray, float]]:
        """(name, components, epsilon) for {X_a^up, (T^up +- S) / |F(T^up +- S, T^up +- S)|^{1/2}}."""
        constants = self.frame_normalization_constants()
        frame = [(f"X{a}", self.lifted_frame_field(f"X{a}"), 1.0) for a in self.calculus.frame_indices]
        for name, value in (('T+S', constants['plus']), ('T-S', constants['minus'])):
            frame.append((name, self.lifted_frame_field(name) / math.sqrt(abs(value)), math.copysign(1.0, value)))
        return frame

    # Pullback calculus on C(M)

    def _directional(self, values: np.ndarray, field: np.ndarray) -> np.ndarray:
        out = np.zeros_like(values)
        for p in range(self.m + 1):
            if np.any(field[p]):
                out += field[p] * self.fd.diff(values, p)
        return out

    def _pullback_covariant(self, phi_lift: np.ndarray, gamma: np.ndarray, v: np.ndarray,
                            field: np.ndarray) -> np.ndarray:
        return (self._directional(v, field)
                + np.einsum('ijk...,j...,k...->i...', gamma, self._directional(phi_lift, field), v))

    def rough_laplacian_lift(self, phi: MapField, v_lift: np.ndarray) -> np.ndarray:
        """Box^Phi V = sum_p eps_p {nabla_{E_p} nabla_{E_p} V - nabla_{nabla_{E_p} E_p} V}."""
        phi_lift = self._lift_array(phi.values)
        gamma = phi.target.christoffel(phi_lift)
        out = np.zeros_like(v_lift)
        for _, field, epsilon in self.lifted_orthonormal_frame():
            first = self._pullback_covariant(phi_lift, gamma, v_lift, field)
            second = self._pullback_covariant(phi_lift, gamma, first, field)
            self_covariant = self.covariant_derivative_fields(field, field)
            out += epsilon * (second - self._pullback_covariant(phi_lift, gamma, v_lift, self_covariant))
        return out

    def rough_laplacian_lift_residual(self, phi: MapField, v: SectionField,
                                      fraction: float = Config.VERIFY_INTERIOR_FRACTION) -> float:
        """max over the interior of |Box^Phi (V o pi) - (Delta_b^phi V) o pi|_h."""
        lifted = self.rough_laplacian_lift(phi, self._lift_array(v.components))
        difference = lifted - self._lift_array(self.calculus.rough_sublaplacian(phi, v).components)
        return self._interior_max(np.max(self._lifted_norm(phi, difference), axis=-1), fraction)

    def bh_lift(self, phi: MapField) -> np.ndarray:
        """BH(Phi) = Box^Phi tau(Phi) + sum_p eps_p R(tau(Phi), Phi_* E_p) Phi_* E_p on C(M)."""
        phi_lift = self._lift_array(phi.values)
        tau = self.tension_lift(phi).values
        riemann = phi.target.riemann(phi_lift)
        out = self.rough_laplacian_lift(phi, tau)
        for _, field, epsilon in self.lifted_orthonormal_frame():
            pushed = self._directional(phi_lift, field)
            out += epsilon * np.einsum('mlkj...,l...,k...,j...->m...', riemann, tau, pushed, pushed)
        return out

    def bh_lift_residual(self, phi: MapField, fraction: float = Config.VERIFY_INTERIOR_FRACTION) -> float:
        """max over the interior of |BH(phi o pi) - BH_b(phi) o pi|_h."""
        difference = self.bh_lift(phi) - self._lift_array(self.calculus.bh_operator(phi).components)
        return self._interior_max(np.max(self._lifted_norm(phi, difference), axis=-1), fraction)

    def integrate_lifted(self, values: np.ndarray) -> float:
        """Integral over C(M) against pi^* Psi ^ d gamma."""
        return float(integrate_array(np.sum(values, axis=-1), self.grid)) * self.circle.quadrature_weight()
