"""
Worked instances: line bundles over ℓ points, two points in genus 0, and a
single point of higher rank.
"""
import itertools
import logging
from fractions import Fraction
from math import floor

import numpy as np
from scipy import linalg

from moduli.exceptions import InfeasibleDegree, InvalidMatrix
from moduli.models import Verdict
from moduli.services.correspondence import genus0_two_point_normalize
from moduli.services.framed_bundle import degree_range
from moduli.services.git_weights import cstar_classify
from moduli.services.grassmann import moment_right_graph
from moduli.services.linalg_core import (
    complex_gaussian, frobenius, make_rng, moduli_setting, nearest_unitary, resolve_tolerance,
)

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
CHART_RANK_TOL = 1e-6
MAX_GENUS0_RANK = 6

# Per-point patterns (s, t) of a line in C ⊕ C: graph, fiber, framing.
LINE_PATTERNS = ((0, 0), (1, 0), (0, 1))


# ===== LINE BUNDLES =====

def line_bundle_strata(ell, delta0) -> dict:
    if ell < 1:
        raise InvalidMatrix('Need at least one marked point')
    if abs(delta0) > degree_range(1, ell):
        raise InfeasibleDegree(f'|δ₀| = {abs(delta0)} exceeds {degree_range(1, ell)} for ℓ = {ell}')
    half = Fraction(ell, 2)
    s_bound, t_bound = half - delta0, half + delta0
    strata = []
    mismatches = 0
    for pattern in itertools.product(LINE_PATTERNS, repeat=ell):
        s = [p[0] for p in pattern]
        t = [p[1] for p in pattern]
        verdict, _ = cstar_classify(1, ell, delta0, s, t)
        by_bounds = sum(s) <= s_bound and sum(t) <= t_bound
        if by_bounds != (verdict != Verdict.UNSTABLE):
            mismatches += 1
        if verdict == Verdict.UNSTABLE:
            continue
        generic = sum(1 for p in pattern if p == (0, 0))
        strata.append({
            's': s,
            't': t,
            'verdict': verdict.value,
            'dimension': max(generic - 1, 0),
        })
    report = {
        'n': 1,
        'ell': ell,
        'delta0': delta0,
        'max_sum_s': floor(s_bound),
        'max_sum_t': floor(t_bound),
        'quotient_dimension': ell - 1,
        'strata': strata,
        'cstar_mismatches': mismatches,
    }
    logger.info(f'Line bundles ℓ={ell}, δ₀={delta0}: {len(strata)} semistable strata')
    return report


def cmd_example_line_bundles(ell, delta0) -> dict:
    return line_bundle_strata(ell, delta0)


# ===== GENUS 0, TWO POINTS =====

def _chart(gamma2, tol):
    """Normalized coordinates (δ, polar unitary of γ₂) as a real vector."""
    delta, _, _ = genus0_two_point_normalize(gamma2, tol)
    unitary = nearest_unitary(gamma2)
    return np.concatenate([
        delta.real.ravel(), delta.imag.ravel(), unitary.real.ravel(), unitary.imag.ravel(),
    ])


def chart_rank(gamma2, step=FD_STEP, tol=None) -> int:
    """Rank of the central-difference Jacobian of the chart over the 2n² real directions of γ₂."""
    tol = resolve_tolerance(tol)
    n = gamma2.shape[0]
    columns = []
    for index in range(2 * n * n):
        direction = np.zeros(2 * n * n)
        direction[index] = 1.0
        E = (direction[:n * n] + 1j * direction[n * n:]).reshape(n, n)
        forward = _chart(gamma2 + step * E, tol)
        backward = _chart(gamma2 - step * E, tol)
        columns.append((forward - backward) / (2 * step))
    sv = linalg.svdvals(np.array(columns).T)
    return int(np.count_nonzero(sv > CHART_RANK_TOL * sv[0]))


def cmd_example_genus0(n, seed=None, tol=None) -> dict:
    if not 1 <= n <= MAX_GENUS0_RANK:
        raise InvalidMatrix(f'Rank must be between 1 and {MAX_GENUS0_RANK}')
    tol = resolve_tolerance(tol)
    seed = moduli_setting('DEFAULT_SEED') if seed is None else seed
    rng = make_rng(seed)
    gamma2 = complex_gaussian(rng, (n, n))
    delta, gamma1, residual = genus0_two_point_normalize(gamma2, tol)
    moment_residual = frobenius(moment_right_graph(gamma1) + moment_right_graph(gamma2))
    rank = chart_rank(gamma2, tol=tol)
    logger.info(f'Genus 0, n={n}: residual {residual:.3e}, chart rank {rank}')
    return {
        'n': n,
        'seed': seed,
        'delta': delta,
        'gamma1': gamma1,
        'normalize_residual': residual,
        'moment_residual': moment_residual,
        'chart_rank': rank,
        'expected_rank': 2 * n * n,
    }


# ===== ONE POINT =====

def one_point_region(n, delta0) -> dict:
    if abs(delta0) > degree_range(n, 1):
        raise InfeasibleDegree(f'|δ₀| = {abs(delta0)} exceeds (n - 1)/2 for n = {n}')
    semistable, stable = [], []
    for s in range(n + 1):
        for t in range(n + 1 - s):
            verdict, _ = cstar_classify(n, 1, delta0, [s], [t])
            if verdict == Verdict.UNSTABLE:
                continue
            semistable.append((s, t))
            if verdict == Verdict.STABLE:
                stable.append((s, t))
    t_values = {t for _, t in semistable}
    s_values = {s for s, _ in semistable}
    projective = t_values == {0} and n not in s_values
    return {
        'n': n,
        'delta0': delta0,
        's_bound': Fraction(n, 2) - delta0,
        't_bound': Fraction(n, 2) + delta0,
        'region': semistable,
        'stable_region': stable,
        'max_s': max(s_values),
        'max_t': max(t_values),
        'projective_space': projective,
        'fiber_dimension': n * n - 1 if projective else None,
    }


def cmd_example_one_point(n, delta0) -> dict:
    return one_point_region(n, delta0)
