"""
Unit tests for VariationalEngine, the descent flow and the initial map presets.
"""

import os
import sys
import unittest
from unittest.mock import Mock

import numpy as np

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from config.constants import TRACE_CSV_HEADER
from fields.fields import MapField, SectionField
from fields.grid import BumpProfile, GridSpec
from models.heisenberg import HeisenbergModel
from models.target import TargetGeometry
from operators.subelliptic import SubellipticCalculus
from simulation.presets import make_initial_map
from simulation.variational import FlowConfig, FlowRecord, FlowTrace, VariationalEngine


class TestEnergies(unittest.TestCase):
    """Test cases for E_{1,b} and E_{2,b}."""

    def setUp(self):
        """Set up test fixtures."""
        self.grid = GridSpec.uniform(1, extent=1.0, points=11)
        self.engine = VariationalEngine(SubellipticCalculus(HeisenbergModel(n=1), self.grid))
        self.flat = TargetGeometry.flat(2)
        self.x, self.y, self.t = self.grid.mesh

    def test_constant_map_has_zero_energy(self):
        """Test that both energies vanish on a constant map."""
        phi = MapField.constant(self.grid, TargetGeometry.sphere(2), [0.3, 0.1])
        self.assertAlmostEqual(self.engine.energy_e1b(phi), 0.0, places=12)
        self.assertAlmostEqual(self.engine.energy_e2b(phi), 0.0, places=12)

    def test_linear_map(self):
        """Test E_{1,b}(x) = 1/2 s^2 vol = 4 and E_{2,b}(x) = 0."""
        phi = make_initial_map('linear', self.grid, self.flat)
        self.assertAlmostEqual(self.engine.energy_e1b(phi), 4.0, places=10)
        self.assertAlmostEqual(self.engine.energy_e2b(phi), 0.0, places=10)

    def test_quadratic_map(self):
        """Test E_{2,b}(x^2) = 1/2 (2 s^2)^2 vol = 4."""
        phi = MapField(self.grid, np.stack([self.x ** 2, np.zeros(self.grid.shape)]), self.flat)
        self.assertAlmostEqual(self.engine.energy(phi, 'e2b'), 4.0, places=9)

    def test_energy_scaling_on_flat_target(self):
        """Test that doubling a map quadruples both energies on a flat target."""
        values = np.stack([np.sin(self.x + self.t), self.y * self.t])
        phi = MapField(self.grid, values, self.flat)
        double = MapField(self.grid, 2 * values, self.flat)
        self.assertAlmostEqual(self.engine.energy_e1b(double), 4 * self.engine.energy_e1b(phi), places=9)
        self.assertAlmostEqual(self.engine.energy_e2b(double), 4 * self.engine.energy_e2b(phi), places=8)

    def test_unknown_functional(self):
        """Test that unknown functionals are rejected."""
        phi = MapField.constant(self.grid, self.flat, [0.0, 0.0])
        with self.assertRaises(ValueError):
            self.engine.energy(phi, 'e3b')


class TestFirstVariation(unittest.TestCase):
    """
    Test cases for the first variation.

    Gaussians that vanish to roundoff near the boundary make the discrete
    frame derivatives exactly antisymmetric, so analytic and differenced
    variations agree on flat targets up to roundoff.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.grid = GridSpec.uniform(1, extent=2.0, points=33)
        self.engine = VariationalEngine(SubellipticCalculus(HeisenbergModel(n=1), self.grid))
        self.flat = TargetGeometry.flat(2)
        x, y, t = self.grid.mesh
        first = np.exp(-16.0 * ((x - 0.2) ** 2 + (y + 0.1) ** 2 + (t - 0.15) ** 2))
        second = np.exp(-16.0 * ((x + 0.1) ** 2 + (y - 0.2) ** 2 + (t - 0.05) ** 2))
        self.phi = MapField(self.grid, np.stack([first, 0.5 * x * first]), self.flat)
        self.v = SectionField(self.grid, np.stack([(y - t) * second, second]), self.phi)

    def test_bienergy_variation(self):
        """Test d/dt E_{2,b}(phi + tV) = (V, BH_b(phi))."""
        analytic = self.engine.first_variation_analytic(self.phi, self.v)
        numeric = self.engine.first_variation_fd(self.phi, self.v)
        self.assertGreater(abs(analytic), 1e-6)
        self.assertAlmostEqual(numeric / analytic, 1.0, places=6)

    def test_energy_variation(self):
        """Test d/dt E_{1,b}(phi + tV) = -(V, tau_b(phi))."""
        analytic = self.engine.first_variation_e1b_analytic(self.phi, self.v)
        numeric = self.engine.first_variation_e1b_fd(self.phi, self.v)
        self.assertGreater(abs(analytic), 1e-6)
        self.assertAlmostEqual(numeric / analytic, 1.0, places=6)

    def test_step_must_be_positive(self):
        """Test that a zero difference step is rejected."""
        with self.assertRaises(ValueError):
            self.engine.first_variation_fd(self.phi, self.v, step=0.0)


class TestFlow(unittest.TestCase):
    """Test cases for the descent flow."""

    def setUp(self):
        """Set up test fixtures."""
        self.grid = GridSpec.uniform(1, extent=1.0, points=11)
        self.engine = VariationalEngine(SubellipticCalculus(HeisenbergModel(n=1), self.grid))
        self.flat = TargetGeometry.flat(2)
        self.profile = BumpProfile(0.3, 0.9, 2)

    def test_constant_map_converges_immediately(self):
        """Test that a constant map converges at step 0 with a single record."""
        phi0 = make_initial_map('constant', self.grid, TargetGeometry.sphere(2), base_point=[0.2, 0.1])
        phi, trace = self.engine.flow_run(phi0, FlowConfig(max_steps=10))
        self.assertEqual(trace.status, 'converged')
        self.assertEqual(trace.steps_taken, 0)
        self.assertEqual(len(trace.records), 1)
        np.testing.assert_array_equal(phi.values, phi0.values)

    def test_bienergy_flow_is_monotone(self):
        """Test that accepted steps never increase E_{2,b}."""
        phi0 = make_initial_map('bump', self.grid, self.flat, self.profile, amplitude=0.2)
        config = FlowConfig(step_size=1e-3, max_steps=5, energy_log_interval=1, variation_weight=self.profile)
        callback = Mock()
        self.engine.on_progress_update = callback
        _, trace = self.engine.flow_run(phi0, config)
        self.assertIn(trace.status, ('max_steps', 'converged', 'stalled'))
        self.assertTrue(trace.is_monotone('e2b'))
        self.assertEqual(trace.records[0].step, 0)
        self.assertEqual(callback.call_count, len(trace.records))
        steps = trace.column('step')
        self.assertEqual(steps, sorted(set(steps)))

    def test_energy_flow_is_monotone(self):
        """Test the E_{1,b} flow along tau_b."""
        phi0 = make_initial_map('bump', self.grid, self.flat, self.profile, amplitude=0.2)
        config = FlowConfig(step_size=1e-2, max_steps=4, energy_log_interval=1, functional='e1b',
                            variation_weight=self.profile)
        _, trace = self.engine.flow_run(phi0, config)
        self.assertTrue(trace.is_monotone('e1b'))
        self.assertLessEqual(trace.records[-1].e1b, trace.records[0].e1b)

    def test_flat_bump_flow_reduces_bh(self):
        """Test that 2000 steps on the flat bump preset bring ||BH_b|| below 1% of its initial value."""
        grid = GridSpec.uniform(1, extent=1.0, points=9)
        engine = VariationalEngine(SubellipticCalculus(HeisenbergModel(n=1), grid))
        phi0 = make_initial_map('bump', grid, self.flat, self.profile, amplitude=0.2)
        config = FlowConfig(step_size=5e-4, max_steps=2000, energy_log_interval=100, variation_weight=self.profile)
        _, trace = engine.flow_run(phi0, config)
        self.assertIn(trace.status, ('max_steps', 'converged'))
        self.assertTrue(trace.is_monotone('e2b'))
        self.assertLess(trace.records[-1].bh_l2, 0.01 * trace.records[0].bh_l2)

    def test_sphere_flow_reduces_tension(self):
        """Test that a bump perturbation of a constant sphere map flows toward a harmonic map."""
        sphere = TargetGeometry.sphere(2)
        phi0 = make_initial_map('bump', self.grid, sphere, self.profile, amplitude=0.1, base_point=[0.2, -0.1])
        config = FlowConfig(step_size=1e-4, max_steps=50, energy_log_interval=10, variation_weight=self.profile)
        _, trace = self.engine.flow_run(phi0, config)
        self.assertFalse(trace.aborted)
        self.assertTrue(trace.is_monotone('e2b'))
        self.assertLess(trace.records[-1].tau_l2, trace.records[0].tau_l2)

    def test_chart_overflow_aborts(self):
        """Test that leaving the chart aborts the flow with the step recorded."""
        sphere = TargetGeometry.sphere(2, chart_bound=0.5)
        phi0 = make_initial_map('bump', self.grid, sphere, self.profile, amplitude=0.45)
        phi, trace = self.engine.flow_run(phi0, FlowConfig(step_size=1e6, max_steps=3,
                                                           variation_weight=self.profile))
        self.assertTrue(trace.aborted)
        self.assertEqual(trace.abort_step, 1)
        self.assertIn('step 1', trace.abort_reason)
        np.testing.assert_array_equal(phi.values, phi0.values)

    def test_trace_csv(self):
        """Test the CSV header and one row per record."""
        phi0 = make_initial_map('bump', self.grid, self.flat, self.profile)
        _, trace = self.engine.flow_run(phi0, FlowConfig(step_size=1e-3, max_steps=2, energy_log_interval=1,
                                                         variation_weight=self.profile))
        lines = trace.to_csv().strip().splitlines()
        self.assertEqual(lines[0], TRACE_CSV_HEADER)
        self.assertEqual(len(lines), len(trace.records) + 1)
        self.assertEqual(trace.to_dict()['status'], trace.status)


class TestFlowRecords(unittest.TestCase):
    """Test cases for FlowConfig and FlowTrace."""

    def test_flow_config_validation(self):
        """Test that invalid flow parameters raise ValueError."""
        with self.assertRaises(ValueError):
            FlowConfig(step_size=0.0)
        with self.assertRaises(ValueError):
            FlowConfig(max_steps=-1)
        with self.assertRaises(ValueError):
            FlowConfig(functional='e3b')
        self.assertEqual(FlowConfig().to_dict()['variation_weight']['smoothness'], BumpProfile().smoothness)

    def test_trace_rejects_out_of_order_records(self):
        """Test that record steps must increase."""
        trace = FlowTrace()
        trace.append(FlowRecord(3, 1.0, 1.0, 1.0, 1.0, 0.0))
        with self.assertRaises(ValueError):
            trace.append(FlowRecord(3, 1.0, 1.0, 1.0, 1.0, 0.0))
        self.assertEqual(trace.records[0].as_row()[0], 3)

    def test_presets(self):
        """Test the preset builders and their validation."""
        grid = GridSpec.uniform(1, points=9)
        flat = TargetGeometry.flat(2)
        random_a = make_initial_map('random', grid, flat, seed=4)
        random_b = make_initial_map('random', grid, flat, seed=4)
        np.testing.assert_array_equal(random_a.values, random_b.values)
        bump = make_initial_map('bump', grid, flat, amplitude=0.3)
        self.assertAlmostEqual(float(bump.values[0, 4, 4, 4]), 0.3)
        with self.assertRaises(ValueError):
            make_initial_map('spiral', grid, flat)


if __name__ == '__main__':
    unittest.main()
