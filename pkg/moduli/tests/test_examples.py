from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from moduli.exceptions import InfeasibleDegree, InvalidMatrix
from moduli.services.examples import (
    cmd_example_genus0, cmd_example_line_bundles, cmd_example_one_point,
)


class LineBundleTests(SimpleTestCase):
    def test_projective_plane_case(self):
        report = cmd_example_line_bundles(3, 1)
        self.assertEqual(report['quotient_dimension'], 2)
        self.assertEqual(report['max_sum_s'], 0)
        self.assertEqual(report['max_sum_t'], 2)
        self.assertEqual(report['cstar_mismatches'], 0)
        for stratum in report['strata']:
            self.assertEqual(stratum['s'], [0, 0, 0])
            self.assertLessEqual(sum(stratum['t']), 2)
        self.assertIn([0, 1, 1], [stratum['t'] for stratum in report['strata']])

    def test_product_of_lines_case(self):
        report = cmd_example_line_bundles(3, 0)
        self.assertEqual(report['quotient_dimension'], 2)
        self.assertEqual((report['max_sum_s'], report['max_sum_t']), (1, 1))
        self.assertEqual(report['cstar_mismatches'], 0)
        for stratum in report['strata']:
            self.assertLessEqual(sum(stratum['s']), 1)
            self.assertLessEqual(sum(stratum['t']), 1)
        open_stratum = next(s for s in report['strata'] if not any(s['s'] + s['t']))
        self.assertEqual(open_stratum['dimension'], 2)

    def test_single_point(self):
        report = cmd_example_line_bundles(1, 0)
        self.assertEqual([(s['s'], s['t']) for s in report['strata']], [([0], [0])])

    def test_infeasible_degree(self):
        with self.assertRaises(InfeasibleDegree):
            cmd_example_line_bundles(3, 2)

    def test_needs_a_marked_point(self):
        with self.assertRaises(InvalidMatrix):
            cmd_example_line_bundles(0, 0)


class GenusZeroExampleTests(SimpleTestCase):
    def test_chart_has_full_rank(self):
        for n in (1, 2, 3):
            report = cmd_example_genus0(n, seed=n)
            self.assertLess(report['moment_residual'], 1e-9)
            self.assertEqual(report['chart_rank'], report['expected_rank'])
            self.assertEqual(report['chart_rank'], 2 * n * n)

    def test_scalar_case(self):
        report = cmd_example_genus0(1, seed=0)
        self.assertLess(report['normalize_residual'], 1e-10)

    def test_seed_reproducibility(self):
        first, second = cmd_example_genus0(2, seed=7), cmd_example_genus0(2, seed=7)
        np.testing.assert_array_equal(first['delta'], second['delta'])

    def test_rank_limit(self):
        with self.assertRaises(InvalidMatrix):
            cmd_example_genus0(7, seed=0)


class OnePointTests(SimpleTestCase):
    def test_extreme_degree_gives_projective_space(self):
        for n in (1, 3, 5):
            delta0 = -(n - 1) // 2
            report = cmd_example_one_point(n, delta0)
            self.assertEqual(report['max_t'], 0)
            self.assertLess(report['max_s'], n)
            self.assertTrue(report['projective_space'])
            self.assertEqual(report['fiber_dimension'], n * n - 1)

    def test_rank_three(self):
        report = cmd_example_one_point(3, -1)
        self.assertEqual(report['region'], [(0, 0), (1, 0), (2, 0)])
        self.assertEqual(report['s_bound'], Fraction(5, 2))

    def test_rank_two(self):
        report = cmd_example_one_point(2, 0)
        self.assertEqual((report['max_s'], report['max_t']), (1, 1))
        self.assertFalse(report['projective_space'])
        self.assertIsNone(report['fiber_dimension'])

    def test_infeasible_degree(self):
        with self.assertRaises(InfeasibleDegree):
            cmd_example_one_point(3, 2)
