from django.test import SimpleTestCase

from moduli.models import Verdict
from moduli.services.extended_moduli import random_gm_point
from moduli.services.pipeline import cmd_pipeline, gm_checks


class PipelineTests(SimpleTestCase):
    def test_rank_one_point_is_stable(self):
        report = cmd_pipeline(random_gm_point(1, 0, 2, seed=1), seed=1)
        self.assertEqual(report['delta0'], 0)
        self.assertEqual(report['verdict'], Verdict.STABLE)
        self.assertTrue(report['within_tolerance'])
        self.assertTrue(report['ok'])

    def test_checks_on_higher_rank(self):
        checks = gm_checks(random_gm_point(2, 1, 2, seed=2))
        self.assertTrue(checks['eigenspaces_match'])
        self.assertLess(checks['relation_residual'], 1e-10)
        self.assertLess(checks['level_residual'], 1e-10)

    def test_report_carries_every_stage(self):
        report = cmd_pipeline(random_gm_point(2, 0, 2, seed=3), seed=3)
        self.assertEqual(len(report['plane_invariants']), 2)
        self.assertEqual(report['parabolic'].ell, 2)
        self.assertIn(report['verdict'], list(Verdict))
