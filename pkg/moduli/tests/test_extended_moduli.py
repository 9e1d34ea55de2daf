import itertools

import numpy as np
from django.test import SimpleTestCase

from moduli.exceptions import InfeasibleDegree, InvalidMatrix, ResidualExceeded
from moduli.models import EMPoint, GMPoint
from moduli.services.extended_moduli import (
    act, boundary_multiplicities, eigenspace_identity, gm_level_residual, gm_right_moment,
    is_irreducible, level_planes, random_gm_point, relation_residual, smoothness_hypotheses,
    solve_delta1, trace_checks,
)
from moduli.services.linalg_core import (
    Tolerance, frobenius, haar_unitary, make_rng, random_hermitian_with_spectrum,
)

POINTS_PER_SHAPE = 500


def haar_em_point(n, genus, ell, rng):
    spectra = [rng.uniform(-0.45, 0.45, size=n) for _ in range(ell - 1)]
    return EMPoint(
        n=n,
        genus=genus,
        A=[haar_unitary(n, rng) for _ in range(genus)],
        B=[haar_unitary(n, rng) for _ in range(genus)],
        C=[np.eye(n)] + [haar_unitary(n, rng) for _ in range(ell - 1)],
        delta=[None] + [random_hermitian_with_spectrum(s, rng) for s in spectra],
    )


def boundary_gm_point(n, ell, rng):
    """Genus-0 GM point whose δ_i carry random numbers of exact ±1/2 eigenvalues."""
    deltas, expected = [], []
    for _ in range(ell):
        s = int(rng.integers(0, n + 1))
        t = int(rng.integers(0, n - s + 1))
        spectrum = [0.5] * s + list(rng.uniform(-0.45, 0.45, size=n - s - t)) + [-0.5] * t
        deltas.append(random_hermitian_with_spectrum(spectrum, rng))
        expected.append((s, t))
    em = EMPoint(
        n=n, genus=0, A=[], B=[],
        C=[np.eye(n)] + [haar_unitary(n, rng) for _ in range(ell - 1)],
        delta=deltas,
    )
    planes = [level_planes(d, rng) for d in deltas]
    point = GMPoint(em=em, b_star=[b for b, _ in planes], d_star=[d for _, d in planes])
    return point, expected


class RelationSolverTests(SimpleTestCase):
    def test_solved_points_satisfy_the_relation(self):
        rng = make_rng(0)
        for n, genus, ell in itertools.product((1, 2, 3), (0, 1, 2), (1, 2)):
            for _ in range(POINTS_PER_SHAPE):
                solved = solve_delta1(haar_em_point(n, genus, ell, rng))
                self.assertLess(relation_residual(solved), 1e-10)
                total = sum(np.real(np.trace(d)) for d in solved.delta)
                self.assertLess(abs(total - round(total)), 1e-8)

    def test_unsolved_point_has_no_relation(self):
        pt = haar_em_point(2, 1, 2, make_rng(1))
        with self.assertRaises(InvalidMatrix):
            relation_residual(pt)

    def test_solver_needs_a_marked_point(self):
        pt = EMPoint(n=1, genus=1, A=[np.eye(1)], B=[np.eye(1)], C=[], delta=[])
        with self.assertRaises(InvalidMatrix):
            solve_delta1(pt)

    def test_residual_over_tolerance_is_an_error(self):
        pt = haar_em_point(3, 1, 2, make_rng(5))
        with self.assertLogs('moduli.services.extended_moduli', level='ERROR'):
            with self.assertRaises(ResidualExceeded) as ctx:
                solve_delta1(pt, Tolerance(residual_abs=1e-300))
        self.assertGreater(ctx.exception.context['residual'], 1e-300)

    def test_first_holonomy_must_be_identity(self):
        with self.assertRaises(InvalidMatrix):
            EMPoint(n=2, genus=0, A=[], B=[], C=[haar_unitary(2, make_rng(2))], delta=[None])

    def test_action_preserves_relation(self):
        rng = make_rng(3)
        solved = solve_delta1(haar_em_point(2, 1, 2, rng))
        moved = act(solved, [haar_unitary(2, rng) for _ in range(2)])
        self.assertLess(relation_residual(moved), 1e-10)


class GMPointTests(SimpleTestCase):
    def test_random_point_is_on_the_level_set(self):
        pt = random_gm_point(2, 1, 2, seed=4)
        self.assertLess(gm_level_residual(pt), 1e-10)
        self.assertLess(relation_residual(pt.em), 1e-10)
        checks = trace_checks(pt)
        self.assertTrue(checks['integral'])
        self.assertTrue(checks['matches_degree'])
        self.assertTrue(checks['shifted_identity'])
        self.assertLess(checks['determinant_residual'], 1e-8)

    def test_action_preserves_the_level_set(self):
        rng = make_rng(5)
        pt = random_gm_point(3, 0, 2, seed=5)
        moved = act(pt, [haar_unitary(3, rng) for _ in range(2)])
        self.assertLess(gm_level_residual(moved), 1e-10)
        for before, after in zip(gm_right_moment(pt), gm_right_moment(moved)):
            self.assertLess(frobenius(before - after), 1e-12)

    def test_eigenspace_identity(self):
        rng = make_rng(6)
        for _ in range(POINTS_PER_SHAPE):
            n = int(rng.integers(1, 4))
            pt, expected = boundary_gm_point(n, int(rng.integers(1, 3)), rng)
            for row, (s, t) in zip(eigenspace_identity(pt), expected):
                self.assertEqual(row['plus_half'], s)
                self.assertEqual(row['kernel_b'], s)
                self.assertEqual(row['minus_half'], t)
                self.assertEqual(row['kernel_d'], t)

    def test_boundary_multiplicities(self):
        self.assertEqual(boundary_multiplicities(np.diag([0.5, 0.1, -0.5, -0.5])), (1, 2))

    def test_level_planes_have_orthonormal_rows(self):
        rng = make_rng(7)
        delta = random_hermitian_with_spectrum([0.5, 0.2, -0.3], rng)
        b_star, d_star = level_planes(delta, rng)
        rows = np.hstack([b_star, d_star])
        self.assertLess(frobenius(rows @ rows.conj().T - np.eye(3)), 1e-12)

    def test_prescribed_degree(self):
        pt = random_gm_point(1, 0, 1, delta0=0, seed=8)
        self.assertEqual(pt.delta0, 0)

    def test_infeasible_degree(self):
        with self.assertRaises(InfeasibleDegree):
            random_gm_point(1, 0, 1, delta0=5)

    def test_needs_a_marked_point(self):
        with self.assertRaises(InvalidMatrix):
            random_gm_point(2, 1, 0)

    def test_seeded_points_are_reproducible(self):
        first, second = random_gm_point(2, 1, 2, seed=9), random_gm_point(2, 1, 2, seed=9)
        for a, b in zip(first.b_star + first.d_star, second.b_star + second.d_star):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(first.delta, second.delta):
            np.testing.assert_array_equal(a, b)


class HypothesisTests(SimpleTestCase):
    def test_generic_point_is_smooth(self):
        report = smoothness_hypotheses(random_gm_point(2, 1, 2, seed=10))
        self.assertEqual(report, {
            'interior_delta': True,
            'non_boundary_eigenvalue': True,
            'irreducible': True,
        })

    def test_diagonal_generators_are_reducible(self):
        em = EMPoint(
            n=2, genus=0, A=[], B=[],
            C=[np.eye(2), np.eye(2)],
            delta=[np.diag([0.1, -0.2]), np.diag([-0.1, 0.2])],
        )
        self.assertFalse(is_irreducible(em))

    def test_rank_one_is_irreducible(self):
        em = EMPoint(n=1, genus=0, A=[], B=[], C=[np.eye(1)], delta=[np.zeros((1, 1))])
        self.assertTrue(is_irreducible(em))
