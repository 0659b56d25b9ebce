"""
Unit tests for the HeisenBH field layer.
Tests FiniteDifference, GridSpec, BumpProfile, field arithmetic, quadrature and hfield files.
"""

import math
import os
import shutil
import sys
import tempfile
import unittest

import numpy as np

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from fields.fields import (MapField, ScalarField, SectionField, frame_derivative, integrate, l2_inner,
                           make_bump, read_hfield, write_hfield)
from fields.finite_difference import FiniteDifference, stencil_weights
from fields.grid import BumpProfile, GridSpec
from models.errors import FieldFormatError, GridError
from models.heisenberg import HeisenbergModel
from models.target import TargetGeometry


class TestFiniteDifference(unittest.TestCase):
    """Test cases for FiniteDifference."""

    def test_central_weights(self):
        """Test the classic fourth-order central stencil."""
        weights = stencil_weights((-2, -1, 0, 1, 2))
        np.testing.assert_allclose(weights, [1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12], atol=1e-14)

    def test_polynomial_exactness(self):
        """Test that order-4 stencils differentiate quartics exactly, boundary rows included."""
        x = np.linspace(-1.0, 1.0, 11)
        fd = FiniteDifference([x[1] - x[0]], [11], order=4)
        values = 3 * x ** 4 - x ** 3 + 2 * x
        np.testing.assert_allclose(fd.diff(values, 0), 12 * x ** 3 - 3 * x ** 2 + 2, atol=1e-10)

    def test_convergence_order(self):
        """Test that the error on sin drops by about 2^order when h halves."""
        errors = []
        for count in (21, 41):
            x = np.linspace(0.0, 2.0, count)
            fd = FiniteDifference([x[1] - x[0]], [count], order=4)
            errors.append(np.max(np.abs(fd.diff(np.sin(x), 0) - np.cos(x))))
        self.assertGreater(math.log2(errors[0] / errors[1]), 3.5)

    def test_periodic_axis(self):
        """Test the wrap-around stencil on a periodic grid."""
        count = 64
        gamma = 2 * np.pi * np.arange(count) / count
        fd = FiniteDifference([2 * np.pi / count], [count], order=4, periodic=[True])
        np.testing.assert_allclose(fd.diff(np.sin(gamma), 0), np.cos(gamma), atol=1e-5)

    def test_leading_component_axes(self):
        """Test that grid axes are the trailing ones."""
        x = np.linspace(-1.0, 1.0, 9)
        fd = FiniteDifference([x[1] - x[0]], [9], order=2)
        stacked = np.stack([x, x ** 2])
        out = fd.diff(stacked, 0)
        np.testing.assert_allclose(out[0], np.ones(9), atol=1e-12)
        np.testing.assert_allclose(out[1], 2 * x, atol=1e-12)

    def test_rejects_small_or_mismatched(self):
        """Test GridError on too few points, bad order and mismatched arrays."""
        with self.assertRaises(GridError):
            FiniteDifference([0.1], [4], order=4)
        with self.assertRaises(GridError):
            FiniteDifference([0.1], [11], order=3)
        fd = FiniteDifference([0.1], [11], order=4)
        with self.assertRaises(GridError):
            fd.diff(np.zeros(12), 0)
        with self.assertRaises(GridError):
            fd.diff(np.zeros(11), 1)


class TestGridSpec(unittest.TestCase):
    """Test cases for GridSpec and BumpProfile."""

    def setUp(self):
        """Set up test fixtures."""
        self.grid = GridSpec.uniform(1, extent=1.0, points=9)

    def test_shape_and_spacing(self):
        """Test shape, spacing and coordinates."""
        self.assertEqual(self.grid.shape, (9, 9, 9))
        self.assertEqual(self.grid.size, 729)
        self.assertAlmostEqual(self.grid.max_spacing, 0.25)
        np.testing.assert_allclose(self.grid.axis_coordinates(2), np.linspace(-1, 1, 9))
        self.assertEqual(self.grid.point_array().shape, (9, 9, 9, 3))

    def test_validation(self):
        """Test that even counts, small counts, bad extents and bad orders are rejected."""
        with self.assertRaises(GridError):
            GridSpec.uniform(1, points=10)
        with self.assertRaises(GridError):
            GridSpec.uniform(1, points=7)
        with self.assertRaises(GridError):
            GridSpec.uniform(1, extent=0.0)
        with self.assertRaises(GridError):
            GridSpec.uniform(1, stencil_order=5)
        with self.assertRaises(GridError):
            GridSpec(n=1, extents=(1.0, 1.0), points=(9, 9))

    def test_with_points(self):
        """Test refinement keeps extents and order."""
        finer = self.grid.with_points(17)
        self.assertEqual(finer.points, (17, 17, 17))
        self.assertEqual(finer.extents, self.grid.extents)
        self.assertAlmostEqual(finer.max_spacing, 0.125)

    def test_interior_mask(self):
        """Test the interior mask keeps |x_A| <= fraction * L."""
        mask = self.grid.interior_mask(0.25)
        self.assertEqual(int(mask.sum()), 27)

    def test_bump_profile(self):
        """Test the bump is 1 inside, 0 outside and between in the taper."""
        profile = BumpProfile(0.5, 0.9, 2)
        self.assertEqual(float(profile.taper(np.array(0.3))), 1.0)
        self.assertEqual(float(profile.taper(np.array(0.95))), 0.0)
        self.assertAlmostEqual(float(profile.taper(np.array(0.7))), 0.5)
        weights = profile.weights(self.grid)
        self.assertEqual(weights[4, 4, 4], 1.0)
        self.assertEqual(weights[0, 4, 4], 0.0)

    def test_bump_validation(self):
        """Test that misordered radii are rejected."""
        with self.assertRaises(ValueError):
            BumpProfile(0.9, 0.5)
        with self.assertRaises(ValueError):
            BumpProfile(0.5, 0.9, 0)


class TestFields(unittest.TestCase):
    """Test cases for the discrete fields and quadrature."""

    def setUp(self):
        """Set up test fixtures."""
        self.grid = GridSpec.uniform(1, extent=1.0, points=11)
        self.model = HeisenbergModel(n=1)
        self.flat = TargetGeometry.flat(2)
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up test fixtures."""
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_frame_derivative_on_polynomials(self):
        """Test X~_1 t = s 2y and X~_2 (x y) = s x exactly."""
        x, y, t = self.grid.mesh
        dt = frame_derivative(ScalarField(self.grid, t), 1, self.model)
        np.testing.assert_allclose(dt.values, 2 * self.model.s * y, atol=1e-12)
        dxy = frame_derivative(ScalarField(self.grid, x * y), 2, self.model)
        np.testing.assert_allclose(dxy.values, self.model.s * x, atol=1e-12)

    def test_integrate_constant(self):
        """Test int 1 Psi = 4^n n! (2L)^(2n+1)."""
        self.assertAlmostEqual(integrate(ScalarField(self.grid, np.ones(self.grid.shape))), 4 * 8, places=10)

    def test_scalar_arithmetic(self):
        """Test scalar field arithmetic with fields and floats."""
        f = ScalarField(self.grid, np.full(self.grid.shape, 2.0))
        g = (f * 3.0 - f) + f
        np.testing.assert_allclose(g.values, 6.0)
        np.testing.assert_allclose((-f).values, -2.0)

    def test_map_and_section(self):
        """Test constant maps, sections and the L^2 product on a flat target."""
        phi = MapField.constant(self.grid, self.flat, [0.5, -1.0])
        self.assertEqual(phi.values.shape, (2, 11, 11, 11))
        self.assertAlmostEqual(phi.max_chart_norm, math.sqrt(1.25))
        v = SectionField(self.grid, np.ones((2,) + self.grid.shape), phi)
        self.assertAlmostEqual(l2_inner(v, v), 2 * 32.0, places=10)
        np.testing.assert_allclose(v.pointwise_norm(), math.sqrt(2.0))
        shifted = phi.displaced(v, 0.5)
        np.testing.assert_allclose(shifted.values[0], 1.0)

    def test_section_grid_mismatch(self):
        """Test that shape and grid mismatches raise GridError."""
        phi = MapField.constant(self.grid, self.flat, [0.0, 0.0])
        with self.assertRaises(GridError):
            SectionField(self.grid, np.ones((3,) + self.grid.shape), phi)
        with self.assertRaises(GridError):
            MapField(self.grid, np.zeros((2, 9, 9, 9)), self.flat)

    def test_make_bump(self):
        """Test make_bump uses the default profile."""
        bump = make_bump(self.grid)
        np.testing.assert_allclose(bump.values, BumpProfile().weights(self.grid))

    def test_hfield_round_trip(self):
        """Test that write then read reproduces the grid and values exactly."""
        path = os.path.join(self.test_dir, 'map.hfield')
        values = np.random.default_rng(1).normal(size=(2,) + self.grid.shape)
        write_hfield(path, self.grid, values)
        grid, loaded = read_hfield(path)
        self.assertEqual(grid, self.grid)
        np.testing.assert_array_equal(loaded, values)

    def test_hfield_bad_header(self):
        """Test that a wrong tag raises FieldFormatError."""
        path = os.path.join(self.test_dir, 'bad.hfield')
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write("field v2 n=1 nu=1 dims=9,9,9 extent=1,1,1\n")
        with self.assertRaises(FieldFormatError):
            read_hfield(path)

    def test_hfield_short_file(self):
        """Test that a missing row raises FieldFormatError."""
        path = os.path.join(self.test_dir, 'short.hfield')
        write_hfield(path, self.grid, np.zeros(self.grid.shape))
        with open(path, 'r', encoding='utf-8') as handle:
            lines = handle.readlines()
        with open(path, 'w', encoding='utf-8') as handle:
            handle.writelines(lines[:-1])
        with self.assertRaises(FieldFormatError):
            read_hfield(path)


if __name__ == '__main__':
    unittest.main()
