import itertools
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from moduli.exceptions import InfeasibleDegree, InvalidMatrix, ParameterSingular
from moduli.models import SubspaceWitness, Verdict
from moduli.services.framed_bundle import degree_range
from moduli.services.git_weights import (
    alpha_weight, beta_weight, brute_force_alpha_weight, brute_force_beta_weight,
    classify_k_stability, classify_limit, compare_witnesses, cstar_classify, cstar_parameters,
    echelon_invariants, echelon_invariants_by_rref, encoding_from_fibers, eta,
    k_expansion, minors_weight, verdict_from_sign, w_report,
)
from moduli.services.grassmann import plane_from_span
from moduli.services.linalg_core import column_space, make_rng, null_space, numeric_rank

INSTANCES = 200


def integer_plane(n, s, t, rng):
    """n-plane in C^n ⊕ C^n with t columns in the framing, s in the fiber, small integer entries."""
    while True:
        top = rng.integers(-2, 3, size=(n, n)).astype(complex)
        bottom = rng.integers(-2, 3, size=(n, n)).astype(complex)
        top[:, :t] = 0
        bottom[:, t:t + s] = 0
        M = np.vstack([top, bottom])
        if numeric_rank(M) == n:
            return plane_from_span(n, n, M)


def integer_encoding(rng):
    n = int(rng.integers(1, 4))
    p = int(rng.integers(n, 7))
    ell = int(rng.integers(1, 3))
    ev, planes = [], []
    for _ in range(ell):
        while True:
            e = rng.integers(-3, 4, size=(n, p)).astype(complex)
            if numeric_rank(e) == n:
                break
        s = int(rng.integers(0, n + 1))
        t = int(rng.integers(0, n - s + 1))
        ev.append(e)
        planes.append(integer_plane(n, s, t, rng))
    return encoding_from_fibers(ev, planes, delta0=int(rng.integers(-2, 3)))


def integer_witness(enc, rng):
    """W mixing kernel directions of the first evaluation with integer vectors."""
    p = enc.p
    kernel = null_space(enc.ev[0])
    while True:
        from_kernel = int(rng.integers(0, kernel.shape[1] + 1))
        free = int(rng.integers(0, p - from_kernel + 1))
        columns = [kernel[:, :from_kernel], rng.integers(-2, 3, size=(p, free)).astype(complex)]
        W = column_space(np.hstack(columns))
        if W.shape[1]:
            break
    n_prime = max(1, min(enc.n, W.shape[1]))
    return SubspaceWitness(W=W, n_prime=n_prime, delta0_prime=int(rng.integers(-2, 3)))


class ClosedFormulaTests(SimpleTestCase):
    def test_eta(self):
        self.assertEqual(eta(1, 0), Fraction(2, 3))
        self.assertEqual(eta(3, 1), Fraction(2, 5))

    def test_alpha_weight(self):
        self.assertEqual(alpha_weight(4, 2, 2, 1), 0)
        self.assertEqual(alpha_weight(4, 1, 2, 1), 2)

    def test_alpha_weight_rejects_bad_dimensions(self):
        with self.assertRaises(InvalidMatrix):
            alpha_weight(2, 3, 1, 1)

    def test_beta_weight_rejects_t_prime_above_t(self):
        with self.assertRaises(InvalidMatrix):
            beta_weight(4, 2, 1, 2, 0)

    def test_classify_limit(self):
        self.assertEqual(classify_limit(Fraction(1, 3), Fraction(-5)), Verdict.STABLE)
        self.assertEqual(classify_limit(Fraction(-1, 3), Fraction(5)), Verdict.UNSTABLE)
        self.assertEqual(classify_limit(0, Fraction(1, 2)), Verdict.STABLE)
        self.assertEqual(classify_limit(0, 0), Verdict.STRICTLY_SEMISTABLE)
        self.assertEqual(classify_limit(0, Fraction(-1, 2)), Verdict.UNSTABLE)

    def test_exact_tie_outranks_plain_semistability(self):
        tie = verdict_from_sign(Fraction(0))
        self.assertEqual(tie, Verdict.STRICTLY_SEMISTABLE)
        self.assertEqual(Verdict.STABLE.combine(tie), tie)
        self.assertEqual(Verdict.SEMISTABLE.combine(tie), tie)
        self.assertEqual(tie.combine(Verdict.UNSTABLE), Verdict.UNSTABLE)
        self.assertTrue(tie.is_semistable)


class WeightOracleTests(SimpleTestCase):
    def test_closed_formulas_match_brute_force(self):
        rng = make_rng(11)
        mismatches = []
        for index in range(INSTANCES):
            enc = integer_encoding(rng)
            wit = integer_witness(enc, rng)
            report = w_report(enc, wit)
            for i, (ev, beta) in enumerate(zip(enc.ev, enc.beta)):
                inv = report.invariants[i]
                expected_alpha = alpha_weight(enc.p, wit.p_prime, enc.n, inv.m_prime)
                if brute_force_alpha_weight(ev, wit.W) != expected_alpha:
                    mismatches.append((index, i, 'alpha'))
                if brute_force_beta_weight(beta, wit.W) != report.w_beta[i]:
                    mismatches.append((index, i, 'beta'))
        self.assertEqual(mismatches, [])

    def test_rank_and_echelon_invariants_agree(self):
        rng = make_rng(12)
        mismatches = []
        for index in range(INSTANCES):
            enc = integer_encoding(rng)
            wit = integer_witness(enc, rng)
            for ev, beta in zip(enc.ev, enc.beta):
                by_rank = echelon_invariants(beta, wit.W, ev)
                by_rref = echelon_invariants_by_rref(beta, wit.W, ev)
                if by_rank != by_rref:
                    mismatches.append((index, by_rank, by_rref))
        self.assertEqual(mismatches, [])

    def test_report_is_exact(self):
        enc = integer_encoding(make_rng(13))
        report = w_report(enc, integer_witness(enc, make_rng(14)))
        self.assertIsInstance(report.w_W, Fraction)
        self.assertEqual(report.w_W, report.w_alpha + report.eta * sum(report.w_beta))
        self.assertIn(classify_k_stability(report), list(Verdict))

    def test_witness_inside_the_evaluation_kernel(self):
        ev = np.array([[0, -2, -3], [-1, -3, -2]], dtype=complex)
        enc = encoding_from_fibers([ev], [integer_plane(2, 1, 0, make_rng(17))], delta0=0)
        W = null_space(ev)
        by_rank = echelon_invariants(enc.beta[0], W, ev)
        self.assertEqual(by_rank.m_prime, 0)
        self.assertEqual(by_rank, echelon_invariants_by_rref(enc.beta[0], W, ev))
        self.assertEqual(brute_force_alpha_weight(ev, W), alpha_weight(3, 1, 2, 0))

    def test_minors_weight_skips_vanishing_minors(self):
        M = np.array([[1, 0, 1], [0, 1, 0]], dtype=complex)
        self.assertEqual(minors_weight(M, [5, 1, -3]), 6)
        self.assertEqual(minors_weight(M, [-5, 1, 3]), 4)

    def test_witness_needs_positive_dimensions(self):
        W = np.eye(3, 1, dtype=complex)
        with self.assertRaises(InvalidMatrix):
            SubspaceWitness(W=np.zeros((3, 0), dtype=complex), n_prime=1, delta0_prime=0)
        with self.assertRaises(InvalidMatrix):
            SubspaceWitness(W=W, n_prime=0, delta0_prime=0)
        self.assertEqual(SubspaceWitness(W=W, n_prime=1, delta0_prime=0).p_prime, 1)

    def test_zero_dimensional_witness_has_trivial_invariants(self):
        enc = integer_encoding(make_rng(15))
        empty = np.zeros((enc.p, 0), dtype=complex)
        self.assertEqual(tuple(echelon_invariants(enc.beta[0], empty, enc.ev[0])), (0, 0, 0, 0))


class KExpansionTests(SimpleTestCase):
    def test_limit_classification_matches_large_k_sign(self):
        rng = make_rng(21)
        mismatches = 0
        for _ in range(10 ** 4):
            n = int(rng.integers(1, 4))
            n_prime = int(rng.integers(1, n + 1))
            ell = int(rng.integers(1, 4))
            genus = int(rng.integers(0, 3))
            t = [int(rng.integers(0, n + 1)) for _ in range(ell)]
            t_prime = [int(rng.integers(0, min(ti, n_prime) + 1)) for ti in t]
            r_prime = [int(rng.integers(0, n_prime - tp + 1)) for tp in t_prime]
            w_k, w_inf, w_A = k_expansion(
                n, n_prime, int(rng.integers(-5, 6)), int(rng.integers(-5, 6)),
                genus, 10 ** 4, t, t_prime, r_prime,
            )
            if verdict_from_sign(w_k) != classify_limit(w_inf, w_A):
                mismatches += 1
        self.assertEqual(mismatches, 0)

    def test_needs_positive_rank(self):
        with self.assertRaises(InvalidMatrix):
            k_expansion(2, 0, 0, 0, 0, 1, [0], [0], [0])


class CStarTests(SimpleTestCase):
    def test_parameters(self):
        self.assertEqual(cstar_parameters(1, 2, 0), (Fraction(1), Fraction(0)))
        self.assertEqual(cstar_parameters(2, 3, 1), (Fraction(1), Fraction(1, 2)))

    def test_region_sweep(self):
        for n, ell in itertools.product(range(1, 4), range(1, 4)):
            bound = degree_range(n, ell)
            patterns = [(s, t) for s in range(n + 1) for t in range(n + 1 - s)]
            for delta0 in range(-bound, bound + 1):
                half = Fraction(ell * n, 2)
                for choice in itertools.product(patterns, repeat=ell):
                    s = [a for a, _ in choice]
                    t = [b for _, b in choice]
                    verdict, weights = cstar_classify(n, ell, delta0, s, t)
                    lower, upper = half - delta0 - sum(s), half + delta0 - sum(t)
                    self.assertEqual(weights['limit'], (lower, upper))
                    if lower > 0 and upper > 0:
                        self.assertEqual(verdict, Verdict.STABLE)
                    elif lower >= 0 and upper >= 0:
                        self.assertEqual(verdict, Verdict.SEMISTABLE)
                    else:
                        self.assertEqual(verdict, Verdict.UNSTABLE)

    def test_singular_parameter(self):
        with self.assertRaises(ParameterSingular):
            cstar_classify(1, 2, 1, [0, 0], [0, 0])

    def test_infeasible_degree(self):
        with self.assertRaises(InfeasibleDegree):
            cstar_classify(1, 3, 2, [0, 0, 0], [0, 0, 0])

    def test_pattern_length(self):
        with self.assertRaises(InvalidMatrix):
            cstar_classify(2, 2, 0, [0], [0, 0])


class MonotonicityTests(SimpleTestCase):
    def test_enlarging_by_common_kernel_vectors(self):
        rng = make_rng(16)
        exercised = 0
        for _ in range(100):
            enc = integer_encoding(rng)
            common = null_space(np.vstack(enc.ev))
            if common.shape[1] == 0:
                continue
            wit = integer_witness(enc, rng)
            W1 = column_space(np.hstack([wit.W, common[:, :1]]))
            if W1.shape[1] == wit.W.shape[1]:
                continue
            enlarged = SubspaceWitness(W=W1, n_prime=wit.n_prime, delta0_prime=wit.delta0_prime)
            report, report1 = w_report(enc, wit), w_report(enc, enlarged)
            self.assertEqual(report1.invariants, report.invariants)
            self.assertEqual(report.w_W - report1.w_W, compare_witnesses(report, report1))
            self.assertLess(report1.w_W, report.w_W)
            exercised += 1
        self.assertGreater(exercised, 0)
