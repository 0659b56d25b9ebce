"""
Unit tests for the oracle suite.
Small grids keep the refinement studies quick; checks whose verdict depends
on asymptotic order are only exercised through their mutations.
"""

import json
import math
import os
import sys
import unittest
from unittest.mock import patch

import numpy as np

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from config.constants import CHECK_IDS, EXACT_CHECKS
from models.errors import UnknownCheckError
from models.target import TargetGeometry
from operators.fefferman import CircleGrid, FeffermanLift, LiftedField
from operators.subelliptic import SubellipticCalculus
from utils.helpers import HelperUtils
from verification.inputs import InputGenerator, sample_map
from verification.oracle_suite import OracleSuite, SuiteSettings
from verification.report import CheckResult, LevelResult, VerificationReport


def small_settings(**changes) -> SuiteSettings:
    values = dict(base_points=13, points_step=4, variation_pairs=2, sample_points=10)
    values.update(changes)
    return SuiteSettings(**values)


class TestSuiteSettings(unittest.TestCase):
    """Test cases for SuiteSettings."""

    def test_schedule_and_floors(self):
        """Test the point schedule and per-check floors."""
        settings = small_settings()
        self.assertEqual(settings.point_schedule(3), [13, 17, 21])
        self.assertEqual(settings.floor('energy_ratio'), 1e-6)
        self.assertEqual(settings.floor('green_lemma'), settings.residual_floor)
        self.assertEqual(settings.to_dict()['bump']['smoothness'], settings.bump.smoothness)

    def test_odd_point_counts(self):
        """Test that an odd step is rejected."""
        with self.assertRaises(ValueError):
            small_settings(points_step=3)


class TestOracleSuite(unittest.TestCase):
    """Test cases for OracleSuite."""

    def setUp(self):
        """Set up test fixtures."""
        self.suite = OracleSuite(small_settings())

    def test_registry_covers_every_check(self):
        """Test that every check id has a builder."""
        self.assertEqual(set(self.suite._builders), set(CHECK_IDS))
        self.assertEqual(len(CHECK_IDS), 22)

    def test_exact_checks_pass(self):
        """Test the algebraic checks on a single level."""
        for check_id in EXACT_CHECKS:
            result = self.suite.run_check(check_id, levels=3, seed=1)
            self.assertTrue(result.passed, f"{check_id}: {result.residuals} {result.error}")
            self.assertEqual(len(result.levels), 1)
            self.assertEqual(result.exactness, 'exact')

    def test_energy_ratio_details(self):
        """Test that the energy ratio reports 2 pi and the volume normalization."""
        result = self.suite.run_check('energy_ratio', seed=2)
        self.assertAlmostEqual(result.details['ratio'], 2 * math.pi, places=6)
        self.assertAlmostEqual(result.details['lifted_route_ratio'], 2 * math.pi, places=6)
        self.assertEqual(len(result.details['ratios']), 10)
        self.assertEqual(result.details['volume_normalization'], 3.0)

    def test_roundoff_checks_pass(self):
        """Test checks whose residual sits at roundoff on any grid."""
        for check_id in ('green_lemma', 'nonpositive', 'route_equivalence_tension', 'connection_lift'):
            result = self.suite.run_check(check_id, levels=2, seed=3)
            self.assertTrue(result.passed, f"{check_id}: {result.residuals} {result.error}")

    def test_refinement_reduces_residual(self):
        """Test that the product rule residual drops under refinement."""
        result = self.suite.run_check('product_rule', levels=2, seed=4)
        self.assertIsNone(result.error)
        self.assertLess(result.residuals[1], result.residuals[0])
        self.assertEqual([level.points for level in result.levels], [13, 17])

    def test_first_variation_needs_its_floor(self):
        """Test that first-variation checks fail above their floor whatever the observed order."""
        levels = [LevelResult(13, 0.16, 0.08), LevelResult(17, 0.08, 0.005)]
        bounded = CheckResult('first_variation', 'anchor', 'refinement', levels=list(levels), floor=1e-3)
        ordinary = CheckResult('lee_identity', 'anchor', 'refinement', levels=list(levels), floor=1e-10)
        self.assertFalse(self.suite._verdict(bounded))
        self.assertAlmostEqual(bounded.observed_order, 4.0, places=10)
        self.assertTrue(self.suite._verdict(ordinary))

    def test_unknown_check(self):
        """Test that unknown ids raise UnknownCheckError."""
        with self.assertRaises(UnknownCheckError):
            self.suite.run_check('no_such_check')
        with self.assertRaises(UnknownCheckError):
            self.suite.run_all(levels=1, check_ids=['inverse_identities', 'no_such_check'])

    def test_determinism(self):
        """Test that equal seeds reproduce residuals exactly."""
        first = self.suite.run_check('reciprocal_levi', seed=11)
        second = self.suite.run_check('reciprocal_levi', seed=11)
        self.assertEqual(first.residuals, second.residuals)
        self.assertEqual(first.details, second.details)

    def test_run_all_report(self):
        """Test the report of a selected run."""
        report = self.suite.run_all(levels=1, seed=5, check_ids=['inverse_identities', 'lorentzian_signature'])
        self.assertTrue(report.passed)
        data = json.loads(report.to_json())
        self.assertEqual([check['name'] for check in data['checks']],
                         ['inverse_identities', 'lorentzian_signature'])
        self.assertEqual(data['checks'][0]['verdict'], 'PASS')
        self.assertTrue(report.to_text().strip().splitlines()[-1].startswith('overall: PASS'))
        self.assertEqual(set(report.timing()), {'inverse_identities', 'lorentzian_signature'})


class TestMutations(unittest.TestCase):
    """Deliberate defects that the suite must flag."""

    def test_fiber_weight_breaks_energy_ratio(self):
        """Test that a wrong fiber quadrature weight fails energy_ratio."""
        suite = OracleSuite(small_settings())
        with patch.object(CircleGrid, 'quadrature_weight', lambda self: 1.0):
            result = suite.run_check('energy_ratio', seed=1)
        self.assertFalse(result.passed)

    def test_dropped_cross_term_breaks_route_equivalence(self):
        """Test that dropping a term of the local rough sublaplacian fails route_equivalence_rough."""
        suite = OracleSuite(small_settings())
        zero = lambda self, phi, v, dphis: np.zeros_like(v.components)
        with patch.object(SubellipticCalculus, '_local_cross_term', zero):
            result = suite.run_check('route_equivalence_rough', levels=2, seed=1)
        self.assertFalse(result.passed)
        self.assertGreater(result.residuals[-1], 1e-3)

    def test_dropped_gamma_term_breaks_route_equivalence(self):
        """Test that dropping the Christoffel-Laplacian term fails route_equivalence_rough."""
        suite = OracleSuite(small_settings())
        zero = lambda self, phi, v: np.zeros_like(v.components)
        with patch.object(SubellipticCalculus, '_local_gamma_term', zero):
            result = suite.run_check('route_equivalence_rough', levels=2, seed=1)
        self.assertFalse(result.passed)

    def test_frame_normalization_breaks_lee_identity(self):
        """Test that an unnormalized frame fails the Lee identity."""
        suite = OracleSuite(small_settings(frame_normalization=1.0))
        result = suite.run_check('lee_identity', levels=2, seed=1)
        self.assertFalse(result.passed)
        self.assertGreater(result.residuals[-1], 1e-2)

    def test_curvature_sign_breaks_first_variation_and_bh_lift(self):
        """Test that a flipped curvature trace term fails first_variation and bh_lift."""
        suite = OracleSuite(small_settings())
        original = SubellipticCalculus.curvature_trace_term
        flipped = lambda self, phi, w: original(self, phi, w) * -1.0
        with patch.object(SubellipticCalculus, 'curvature_trace_term', flipped):
            variation = suite.run_check('first_variation', levels=2, seed=1)
            lifted = suite.run_check('bh_lift', levels=2, seed=1)
        self.assertFalse(variation.passed)
        self.assertGreater(variation.residuals[-1], variation.floor)
        self.assertFalse(lifted.passed)

    def test_missing_connection_term_breaks_leibniz(self):
        """Test that a pullback connection without its Christoffel term fails leibniz and route equivalence."""
        suite = OracleSuite(small_settings())
        plain = lambda self, phi, v, direction: v.with_components(self._derivative(v.components, direction))
        with patch.object(SubellipticCalculus, 'pullback_connection', plain):
            leibniz = suite.run_check('leibniz', levels=2, seed=1)
            routes = suite.run_check('route_equivalence_rough', levels=2, seed=1)
        self.assertFalse(leibniz.passed)
        self.assertGreater(leibniz.residuals[-1], 1e-3)
        self.assertFalse(routes.passed)

    def test_wave_operator_drives_energy_ratio(self):
        """Test that a broken wave operator fails energy_ratio."""
        suite = OracleSuite(small_settings())
        zero = lambda self, u: LiftedField(self.grid, self.circle, np.zeros_like(u.values))
        with patch.object(FeffermanLift, 'wave_operator', zero):
            result = suite.run_check('energy_ratio', seed=1)
        self.assertFalse(result.passed)
        self.assertAlmostEqual(result.details['lifted_route_ratio'], 2 * math.pi, places=6)

    def test_errors_are_recorded(self):
        """Test that an exception inside a check becomes a failed result."""
        suite = OracleSuite(small_settings())
        with patch.object(SubellipticCalculus, 'tension_field', side_effect=RuntimeError("boom")):
            result = suite.run_check('route_equivalence_tension', levels=1, seed=1)
        self.assertFalse(result.passed)
        self.assertIn('boom', result.error)


class TestReportAndInputs(unittest.TestCase):
    """Test cases for report records, order estimates and input generators."""

    def test_observed_order(self):
        """Test the log-log slope on an exact power law."""
        spacings = [0.1, 0.05, 0.025]
        residuals = [3.0 * h ** 4 for h in spacings]
        self.assertAlmostEqual(HelperUtils.observed_order(spacings, residuals), 4.0, places=10)
        self.assertIsNone(HelperUtils.observed_order([0.1], [1.0]))
        self.assertIsNone(HelperUtils.observed_order([0.1, 0.05], [1.0, 0.0]))

    def test_check_result_dict(self):
        """Test the serialized keys of a check result."""
        result = CheckResult('green_lemma', 'anchor', 'refinement', levels=[LevelResult(13, 0.1, 1e-12)],
                             floor=1e-10, passed=True)
        data = result.to_dict()
        self.assertEqual(data['verdict'], 'PASS')
        self.assertEqual(data['residuals'], [1e-12])
        self.assertNotIn('wall_time', data)
        self.assertIn('green_lemma', result.summary_line())
        report = VerificationReport(seed=1, levels=1, checks=[result])
        self.assertIs(report.get('green_lemma'), result)
        with self.assertRaises(KeyError):
            report.get('symbol')

    def test_series_is_grid_independent(self):
        """Test that a drawn series gives the same values at shared points."""
        generator = InputGenerator(np.random.default_rng(0), 3)
        series = generator.series(components=2, amplitude=0.3, offset=[0.1, -0.2])
        points = np.array([[0.0, 0.0, 0.0], [0.5, -0.5, 0.25]])
        values = series.evaluate_points(points)
        self.assertEqual(values.shape, (2, 2))
        self.assertLessEqual(float(np.max(np.abs(values - np.array([[0.1], [-0.2]])))), 0.3 + 1e-12)

    def test_sample_map_keeps_offset_outside_bump(self):
        """Test that bumped maps equal the offset outside the support."""
        from fields.grid import BumpProfile, GridSpec
        grid = GridSpec.uniform(1, points=9)
        generator = InputGenerator(np.random.default_rng(1), 3)
        series = generator.series(components=2, amplitude=0.3, offset=[0.25, 0.5])
        phi = sample_map(series, grid, TargetGeometry.sphere(2), BumpProfile(0.1, 0.5, 2))
        np.testing.assert_allclose(phi.values[:, 0, 0, 0], [0.25, 0.5])


if __name__ == '__main__':
    unittest.main()
