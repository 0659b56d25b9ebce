"""
Unit tests for the HeisenBH model layer.
Tests HeisenbergModel, the volume coefficient, TargetGeometry and the error types.
"""

import unittest

import numpy as np

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from models.errors import ChartOverflowError, ConfigError, GridError, NonFiniteError, SubellipticError
from models.heisenberg import HeisenbergModel, volume_density, volume_form_coefficient
from models.target import TargetGeometry, TargetKind


class TestHeisenbergModel(unittest.TestCase):
    """Test cases for HeisenbergModel."""

    def setUp(self):
        """Set up test fixtures."""
        self.model = HeisenbergModel(n=1)
        self.model2 = HeisenbergModel(n=2)
        self.rng = np.random.default_rng(3)

    def test_frame_is_horizontal(self):
        """Test that every frame vector is annihilated by theta."""
        points = self.rng.uniform(-1, 1, size=(20, 5))
        for a in range(1, 5):
            vector = self.model2.frame_vector(a, points)
            self.assertTrue(np.all(self.model2.is_horizontal(points, vector)))

    def test_frame_index_bounds(self):
        """Test that frame indices outside 1..2n are rejected."""
        with self.assertRaises(IndexError):
            self.model.frame_vector(0, np.zeros(3))
        with self.assertRaises(IndexError):
            self.model.frame_vector(3, np.zeros(3))

    def test_bracket_is_multiple_of_reeb(self):
        """Test [X~_1, X~_2] = -4 s^2 T and that other brackets vanish."""
        p = np.array([0.3, -0.7, 0.2])
        bracket = self.model.bracket(1, 2, p)
        np.testing.assert_allclose(bracket, -4 * self.model.s ** 2 * self.model.reeb_vector(p), atol=1e-14)
        np.testing.assert_allclose(self.model.bracket(1, 1, p), np.zeros(3), atol=1e-14)
        p2 = self.rng.uniform(-1, 1, size=5)
        np.testing.assert_allclose(self.model2.bracket(1, 4, p2), np.zeros(5), atol=1e-14)

    def test_reeb_field(self):
        """Test theta(T) = 1 and T in the kernel of d theta."""
        p = np.array([0.1, 0.2, 0.3])
        T = self.model.reeb_vector(p)
        self.assertAlmostEqual(float(np.dot(self.model.contact_form(p), T)), 1.0)
        for a in (1, 2):
            self.assertAlmostEqual(float(self.model.dtheta(T, self.model.frame_vector(a, p))), 0.0)

    def test_levi_form_orthonormal_frame(self):
        """Test that the Levi form makes X~_a orthonormal with s = 1/2."""
        p = self.rng.uniform(-1, 1, size=5)
        for a in range(1, 5):
            for b in range(1, 5):
                value = self.model2.levi_form(p, self.model2.frame_vector(a, p), self.model2.frame_vector(b, p))
                self.assertAlmostEqual(float(value), 1.0 if a == b else 0.0, places=12)

    def test_levi_form_rejects_vertical(self):
        """Test that a non-horizontal argument raises ValueError."""
        p = np.zeros(3)
        with self.assertRaises(ValueError):
            self.model.levi_form(p, self.model.reeb_vector(p), self.model.frame_vector(1, p))

    def test_complex_structure_squares_to_minus_one(self):
        """Test J^2 = -1 on horizontal vectors."""
        p = np.array([0.4, -0.2, 0.9])
        v = self.model.frame_vector(1, p) * 0.3 + self.model.frame_vector(2, p) * 1.7
        np.testing.assert_allclose(self.model.complex_structure(p, self.model.complex_structure(p, v)), -v,
                                   atol=1e-14)

    def test_webster_metric_and_dual_norm(self):
        """Test the Webster metric on the frame and the dual norm of theta."""
        p = np.array([0.5, 0.25, -1.0])
        g = self.model.webster_metric(p)
        X1 = self.model.frame_vector(1, p)
        T = self.model.reeb_vector(p)
        self.assertAlmostEqual(float(X1 @ g @ X1), 1.0, places=12)
        self.assertAlmostEqual(float(T @ g @ T), 1.0, places=12)
        self.assertAlmostEqual(float(X1 @ g @ T), 0.0, places=12)
        self.assertAlmostEqual(float(self.model.dual_norm_sq(p, self.model.contact_form(p))), 1.0, places=12)

    def test_group_law(self):
        """Test identity, inverse, associativity and left invariance of the frame."""
        p = self.rng.uniform(-1, 1, size=3)
        q = self.rng.uniform(-1, 1, size=3)
        r = self.rng.uniform(-1, 1, size=3)
        np.testing.assert_allclose(self.model.group_multiply(p, np.zeros(3)), p)
        np.testing.assert_allclose(self.model.group_multiply(p, self.model.group_inverse(p)), np.zeros(3),
                                   atol=1e-14)
        np.testing.assert_allclose(self.model.group_multiply(self.model.group_multiply(p, q), r),
                                   self.model.group_multiply(p, self.model.group_multiply(q, r)), atol=1e-14)
        jac = self.model.translation_differential(p)
        for a in (1, 2):
            pushed = jac @ self.model.frame_vector(a, q)
            np.testing.assert_allclose(pushed, self.model.frame_vector(a, self.model.group_multiply(p, q)),
                                       atol=1e-14)

    def test_lewy_operator_matches_cr_frame(self):
        """Test Z_alpha = T_alpha / s."""
        p = np.array([0.3, -0.4, 0.1])
        frame = self.model.cr_frame(p)
        np.testing.assert_allclose(self.model.lewy_operator(1, p), frame[:, 1] / self.model.s, atol=1e-14)

    def test_levi_matrix(self):
        """Test g_{alpha betabar} = delta / 2 and its inverse."""
        np.testing.assert_allclose(self.model2.levi_matrix(), 0.5 * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(self.model2.levi_matrix_inverse(), 2.0 * np.eye(2), atol=1e-14)

    def test_frame_decomposition(self):
        """Test d/dx^A = lambda_A^B T_B and mu = lambda^{-1}."""
        p = np.array([0.0, 1.0, 0.0])
        lam, mu = self.model.frame_decomposition(p)
        frame = self.model.cr_frame(p)
        np.testing.assert_allclose(frame @ lam.T, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(lam @ mu, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(lam[0], [-2.0, 2.0, 2.0], atol=1e-14)

    def test_volume_coefficient(self):
        """Test the signed volume coefficient and the positive density."""
        self.assertEqual(volume_form_coefficient(1), 4)
        self.assertEqual(volume_form_coefficient(2), -32)
        self.assertEqual(volume_density(2), 32.0)
        self.assertEqual(HeisenbergModel(n=3).volume_density, 4 ** 3 * 6)

    def test_invalid_model(self):
        """Test that invalid dimensions and normalizations are rejected."""
        with self.assertRaises(ValueError):
            HeisenbergModel(n=0)
        with self.assertRaises(ValueError):
            HeisenbergModel(n=1, frame_normalization=0.0)

    def test_to_dict(self):
        """Test model serialization."""
        data = self.model.to_dict()
        self.assertEqual(data['n'], 1)
        self.assertEqual(data['frame_normalization'], 0.5)


class TestTargetGeometry(unittest.TestCase):
    """Test cases for TargetGeometry."""

    def setUp(self):
        """Set up test fixtures."""
        self.sphere = TargetGeometry.sphere(3)
        self.flat = TargetGeometry.flat(2)

    def test_kind_coercion(self):
        """Test that string kinds are coerced to TargetKind."""
        target = TargetGeometry(2, 'round_sphere', 10.0)
        self.assertIs(target.kind, TargetKind.ROUND_SPHERE)
        with self.assertRaises(ValueError):
            TargetGeometry(2, 'torus', 10.0)

    def test_flat_target_is_trivial(self):
        """Test identity metric, zero Christoffels and zero curvature."""
        y = np.array([0.3, -2.0])
        np.testing.assert_array_equal(self.flat.metric(y), np.eye(2))
        self.assertFalse(np.any(self.flat.christoffel(y)))
        self.assertFalse(np.any(self.flat.riemann(y)))

    def test_sphere_metric_at_origin(self):
        """Test h = 4 delta at the chart origin."""
        np.testing.assert_allclose(self.sphere.metric(np.zeros(3)), 4 * np.eye(3))

    def test_christoffel_matches_fd_oracle(self):
        """Test closed-form Christoffel symbols against the differenced metric."""
        y = np.array([0.3, -0.2, 0.5])
        np.testing.assert_allclose(self.sphere.christoffel(y), self.sphere.christoffel_fd_oracle(y), atol=1e-7)

    def test_curvature_matches_fd_oracle(self):
        """Test closed-form curvature against differenced Christoffels."""
        y = np.array([0.1, 0.4, -0.3])
        u, v, w = np.eye(3)[0], np.array([0.2, 1.0, 0.0]), np.array([0.5, -0.1, 0.7])
        np.testing.assert_allclose(self.sphere.curvature(y, u, v, w),
                                   self.sphere.curvature_fd_oracle(y, u, v, w), atol=1e-6)

    def test_unit_sphere_curvature(self):
        """Test R(u, v) w = h(v, w) u - h(u, w) v for the unit sphere."""
        y = np.array([0.2, -0.1, 0.3])
        h = self.sphere.metric(y)
        u, v, w = np.array([1.0, 0.0, 0.2]), np.array([0.0, 1.0, -0.4]), np.array([0.3, 0.5, 1.0])
        expected = (v @ h @ w) * u - (u @ h @ w) * v
        np.testing.assert_allclose(self.sphere.curvature(y, u, v, w), expected, atol=1e-12)

    def test_chart_overflow(self):
        """Test that chart norms at the bound raise ChartOverflowError."""
        target = TargetGeometry.sphere(2, chart_bound=1.0)
        with self.assertRaises(ChartOverflowError) as context:
            target.check_chart(np.array([[0.5, 2.0], [0.0, 0.0]]))
        self.assertAlmostEqual(context.exception.norm, 2.0)

    def test_non_finite_chart(self):
        """Test that NaN chart values raise NonFiniteError."""
        with self.assertRaises(NonFiniteError):
            self.flat.check_chart(np.array([np.nan, 0.0]))


class TestErrors(unittest.TestCase):
    """Test cases for the error hierarchy."""

    def test_hierarchy(self):
        """Test base classes of the engine errors."""
        self.assertTrue(issubclass(GridError, ValueError))
        self.assertTrue(issubclass(ChartOverflowError, ArithmeticError))
        self.assertTrue(issubclass(ConfigError, SubellipticError))

    def test_config_error_names_key(self):
        """Test that ConfigError carries its key."""
        error = ConfigError('grid.dims', 'bad value')
        self.assertEqual(error.key, 'grid.dims')
        self.assertIn('grid.dims', str(error))


if __name__ == '__main__':
    unittest.main()
