from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from moduli.exceptions import BoundaryDegenerate, MomentMismatch, NothingToShift
from moduli.models import (
    FramedBundleModel, FramedEncoding, ParabolicData, PointParabolic, Verdict,
)
from moduli.services.correspondence import (
    HALF, correspondence_report, genus0_two_point_normalize, hecke_shift, induced_flag,
    level_moment_plane, moduli_moment, moduli_moment_graph, normal_form,
    parabolic_from_gm, parabolic_from_model, parabolic_semistable, pardeg, transfer_plane,
    weights_from_moment,
)
from moduli.services.extended_moduli import level_planes, random_gm_point
from moduli.services.grassmann import (
    coordinate_plane, diagonal_plane, intersection_dims, moment_left, plane_from_graph,
    plane_from_span,
)
from moduli.services.linalg_core import (
    complex_gaussian, frobenius, haar_unitary, make_rng, random_hermitian_with_spectrum,
)
from moduli.tests.factories import (
    coordinate_witness, identity_framed_model, random_level_pair,
)


def random_parabolic_point(n, rng, s_min=0):
    """Flag from nested columns of a Haar unitary, weights random in the open interval."""
    Q = haar_unitary(n, rng)
    dims = sorted(int(d) for d in rng.integers(0, n + 1, size=n + 1))
    dims[0] = max(dims[0], s_min)
    dims = [min(max(d, dims[0]), n) for d in dims]
    flag = [Q[:, :0]] + [Q[:, :d] for d in dims] + [Q]
    interior = sorted((Fraction(int(k), 20) for k in rng.integers(-9, 10, size=n)), reverse=True)
    return PointParabolic(n=n, flag=flag, weights=[HALF] + interior + [-HALF])


class FlagTests(SimpleTestCase):
    def test_identity_framing_gives_standard_flag(self):
        flag = induced_flag(diagonal_plane(3))
        self.assertEqual([F.shape[1] for F in flag], [0, 0, 1, 2, 3, 3])

    def test_fiber_summand_gives_constant_flag(self):
        flag = induced_flag(coordinate_plane(3, 3, 'first'))
        self.assertEqual([F.shape[1] for F in flag], [0, 3, 3, 3, 3, 3])

    def test_mixed_plane_flag_dimensions(self):
        rng = make_rng(1)
        top = complex_gaussian(rng, (3, 3))
        bottom = complex_gaussian(rng, (3, 3))
        top[:, 0] = 0
        bottom[:, 1] = 0
        g = plane_from_span(3, 3, np.vstack([top, bottom]))
        self.assertEqual(intersection_dims(g), (1, 1))
        dims = [F.shape[1] for F in induced_flag(g)]
        self.assertEqual(dims[1], 1)
        self.assertEqual(dims[-2], 2)
        self.assertEqual(dims[-1], 3)

    def test_weights_snap_to_boundary(self):
        values, _, blocks = weights_from_moment(np.diag([0.5 - 1e-9, 0.1, 0.1, -0.5]))
        self.assertEqual(blocks, [(HALF, 1), (Fraction(1, 10), 2), (-HALF, 1)])
        self.assertEqual(values[0], 0.5)


class ParabolicDegreeTests(SimpleTestCase):
    def test_single_half_weight(self):
        point = PointParabolic(
            n=1, flag=[np.zeros((1, 0)), np.eye(1), np.eye(1), np.eye(1)],
            weights=[HALF, 0, -HALF],
        )
        self.assertEqual(pardeg(3, ParabolicData(points=[point])), Fraction(7, 2))

    def test_zero_weights_on_graph_framings(self):
        rng = make_rng(2)
        planes = [plane_from_graph(complex_gaussian(rng, (2, 2))) for _ in range(2)]
        model = FramedBundleModel(genus=0, n=2, delta0=0, g=planes, split_type=(0, 0))
        parabolic = parabolic_from_model(model, [[HALF, 0, 0, -HALF]] * 2)
        self.assertEqual(pardeg(0, parabolic), 0)
        witnesses = [coordinate_witness(2, 2, [0], 0), coordinate_witness(2, 2, [1], 0)]
        record = parabolic_semistable(model, parabolic, witnesses)
        self.assertEqual(record.verdict, Verdict.SEMISTABLE)

    def test_rank_one_is_always_stable(self):
        model = identity_framed_model(1, 2, 0)
        parabolic = parabolic_from_model(model, [[HALF, 0, -HALF]] * 2)
        self.assertEqual(parabolic_semistable(model, parabolic, []).verdict, Verdict.STABLE)


class HeckeTests(SimpleTestCase):
    def test_rank_one_shift(self):
        point = PointParabolic(
            n=1, flag=[np.zeros((1, 0)), np.eye(1), np.eye(1), np.eye(1)],
            weights=[HALF, 0, -HALF],
        )
        shifted, delta0 = hecke_shift(ParabolicData(points=[point]), 4)
        self.assertEqual(delta0, 5)
        self.assertEqual(shifted.points[0].dims, [0, 0, 0, 1])
        self.assertEqual(pardeg(5, shifted), Fraction(9, 2))

    def test_nothing_to_shift(self):
        point = PointParabolic(
            n=1, flag=[np.zeros((1, 0)), np.zeros((1, 0)), np.eye(1), np.eye(1)],
            weights=[HALF, 0, -HALF],
        )
        with self.assertRaises(NothingToShift):
            hecke_shift(ParabolicData(points=[point]), 0)

    def test_parabolic_degree_is_preserved(self):
        rng = make_rng(4)
        for _ in range(1000):
            n = int(rng.integers(1, 4))
            ell = int(rng.integers(1, 4))
            points = [random_parabolic_point(n, rng, s_min=1)] + [
                random_parabolic_point(n, rng) for _ in range(ell - 1)
            ]
            data = ParabolicData(points=points)
            delta0 = int(rng.integers(-3, 4))
            shifted, new_delta0 = hecke_shift(data, delta0)
            self.assertEqual(new_delta0, delta0 + points[0].s)
            self.assertEqual(shifted.points[0].s, 0)
            self.assertEqual(pardeg(new_delta0, shifted), pardeg(delta0, data))


class NormalFormTests(SimpleTestCase):
    def test_random_level_pairs(self):
        rng = make_rng(5)
        for _ in range(300):
            n = int(rng.integers(1, 5))
            s = int(rng.integers(0, n + 1))
            t = int(rng.integers(0, n - s + 1))
            plane, delta = random_level_pair(n, rng, s=s, t=t)
            result = normal_form(plane, delta)
            self.assertEqual(result.block_sizes, (s, n - s - t, t))
            self.assertLess(result.off_pattern_norm, 1e-8)
            r_block = np.real(np.diag(result.delta_hat))[s:n - t]
            self.assertLess(frobenius(result.M @ result.M - np.diag(0.5 - r_block)), 1e-8)

            again = normal_form(result.plane, result.delta_hat)
            self.assertLess(frobenius(again.rho_star - result.rho_star), 1e-8)
            self.assertLess(again.off_pattern_norm, 1e-8)

    def test_zero_moment(self):
        plane = level_moment_plane(*level_planes(np.zeros((2, 2)), make_rng(6)))
        result = normal_form(plane, np.zeros((2, 2)))
        np.testing.assert_allclose(result.M, np.eye(2) / np.sqrt(2), atol=1e-12)
        np.testing.assert_allclose(result.rho_star, np.hstack([np.eye(2), np.eye(2)]) / np.sqrt(2), atol=1e-12)

    def test_boundary_blocks_are_identity(self):
        rng = make_rng(7)
        delta = random_hermitian_with_spectrum([0.5, 0.1, -0.5], rng)
        result = normal_form(level_moment_plane(*level_planes(delta, rng)), delta)
        self.assertEqual(result.block_sizes, (1, 1, 1))
        np.testing.assert_allclose(result.rho_star[0], [0, 0, 0, 1, 0, 0], atol=1e-9)
        np.testing.assert_allclose(result.rho_star[2], [0, 0, 1, 0, 0, 0], atol=1e-9)

    def test_same_moment_gives_same_normal_form(self):
        rng = make_rng(8)
        delta = random_hermitian_with_spectrum([0.3, -0.1, -0.2], rng)
        first = normal_form(level_moment_plane(*level_planes(delta, rng)), delta)
        second = normal_form(level_moment_plane(*level_planes(delta, rng)), delta)
        self.assertLess(frobenius(first.rho_star - second.rho_star), 1e-9)

    def test_eigenvalue_just_inside_the_boundary_misses_the_pattern(self):
        rng = make_rng(19)
        delta = random_hermitian_with_spectrum([0.5 - 1e-8, 0.1], rng)
        plane = level_moment_plane(*level_planes(delta, rng))
        with self.assertRaises(MomentMismatch) as ctx:
            normal_form(plane, delta)
        self.assertEqual(ctx.exception.context['block_sizes'], (1, 1, 0))

    def test_moment_mismatch(self):
        plane, delta = random_level_pair(2, make_rng(9))
        with self.assertRaises(MomentMismatch):
            normal_form(plane, delta + 0.1 * np.eye(2))


class TransferTests(SimpleTestCase):
    def test_identity_transfer(self):
        g = plane_from_graph(complex_gaussian(make_rng(10), (2, 2)))
        self.assertTrue(transfer_plane(g, np.zeros((2, 2)), np.eye(2)).same_as(g))

    def test_transfer_keeps_invariants(self):
        rng = make_rng(11)
        g = plane_from_graph(complex_gaussian(rng, (3, 3)))
        delta = random_hermitian_with_spectrum([0.2, 0.0, -0.3], rng)
        moved = transfer_plane(g, delta, haar_unitary(3, rng), theta=0.7)
        self.assertLess(frobenius(moment_left(moved) - moment_left(g)), 1e-10)
        self.assertEqual(intersection_dims(moved), intersection_dims(g))


class EncodingMomentTests(SimpleTestCase):
    def graph_encoding(self, xi):
        n = xi.shape[1]
        beta = plane_from_span(n, n, np.vstack([xi, np.eye(n)]))
        return FramedEncoding(p=n, n=n, ev=[np.eye(n)], beta=[beta], delta0=0)

    def test_unitary_graph_has_zero_moment(self):
        xi = haar_unitary(2, make_rng(12))
        self.assertLess(frobenius(moduli_moment(self.graph_encoding(xi))[0]), 1e-12)

    def test_annihilator_and_graph_forms_agree(self):
        xi = complex_gaussian(make_rng(13), (3, 3))
        self.assertLess(frobenius(moduli_moment(self.graph_encoding(xi))[0] - moduli_moment_graph(xi)), 1e-10)


class GenusZeroTests(SimpleTestCase):
    def test_identity(self):
        delta, gamma1, residual = genus0_two_point_normalize(np.eye(2))
        np.testing.assert_allclose(delta, 0, atol=1e-12)
        np.testing.assert_allclose(gamma1, np.eye(2), atol=1e-12)

    def test_scalar(self):
        delta, gamma1, residual = genus0_two_point_normalize(np.array([[2.0]]))
        self.assertAlmostEqual(delta[0, 0].real, -0.6, places=12)
        self.assertAlmostEqual(gamma1[0, 0].real, 0.5, places=12)

    def test_random_residual(self):
        _, _, residual = genus0_two_point_normalize(complex_gaussian(make_rng(14), (3, 3)))
        self.assertLess(residual, 1e-9)

    def test_singular_input(self):
        with self.assertRaises(BoundaryDegenerate):
            genus0_two_point_normalize(np.diag([1.0, 0.0]))


class CorrespondenceReportTests(SimpleTestCase):
    def test_report_on_random_point(self):
        pt = random_gm_point(2, 1, 2, seed=15)
        report = correspondence_report(pt)
        self.assertEqual(report['parabolic'].ell, 2)
        for nf in report['normal_forms']:
            self.assertLess(nf.off_pattern_norm, 1e-8)
        self.assertLess(abs(float(report['pardeg'])), 1e-6)
        self.assertEqual(
            [p.dims for p in parabolic_from_gm(pt).points], [p.dims for p in report['parabolic'].points],
        )
