"""
Stability of Grassmannian framed bundles against explicit subbundle witnesses.

"Every subbundle" is an infinite quantifier; verdicts here are certificates
relative to the witness list handed in. Split genus-0 models can produce
their own witness list with ``enumerate_witnesses_genus0``.
"""
import itertools
import logging
from dataclasses import replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from moduli.exceptions import InvalidMatrix, UnsupportedModel
from moduli.models import (
    CertificateStatus, FramedBundleModel, StabilityRecord, SubbundleWitness, Verdict,
)
from moduli.services.grassmann import intersection_dims
from moduli.services.linalg_core import (
    Tolerance, column_space, complex_gaussian, intersection_dim, make_rng,
    moduli_setting, numeric_rank, resolve_tolerance,
)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def degree_range(n, ell) -> int:
    """Largest admissible |δ₀|, namely ⌊(ℓn - 1)/2⌋."""
    return (ell * n - 1) // 2


def plane_invariants(model: FramedBundleModel, tol: Optional[Tolerance] = None) -> List[Tuple[int, int]]:
    return [intersection_dims(g, tol) for g in model.g]


# ===== SUBBUNDLE INVARIANTS =====

def subbundle_invariants(model: FramedBundleModel, wit: SubbundleWitness,
                         tol: Optional[Tolerance] = None) -> List[Tuple[int, int]]:
    """
    Per-point (s'_i, t'_i) with s'_i = dim(g_i ∩ E'_{p_i}) and
    t'_i = dim E'_{p_i} / (E'_{p_i} ∩ Π(g_i)).
    """
    tol = resolve_tolerance(tol)
    if len(wit.fibers) != model.ell:
        raise InvalidMatrix(f'Witness has {len(wit.fibers)} fibers, model has {model.ell} points')
    out = []
    for g, fiber in zip(model.g, wit.fibers):
        if fiber.shape[0] != model.n:
            raise InvalidMatrix(f'Fiber lives in C^{fiber.shape[0]}, expected C^{model.n}')
        embedded = np.vstack([fiber, np.zeros_like(fiber)])
        s_prime = intersection_dim(g.basis, embedded, tol)
        projection = column_space(g.first_block, tol)
        t_prime = wit.n_prime - intersection_dim(fiber, projection, tol)
        out.append((s_prime, t_prime))
    return out


def s1_from_counts(n, delta0, n_prime, delta0_prime, s_prime, t_prime, t) -> Fraction:
    if n_prime < 1:
        raise InvalidMatrix('S¹ needs a witness of positive rank')
    bracket = sum(
        (Fraction(n_prime - sp, n_prime) - Fraction(n_prime - sp - tp + ti, n)
         for sp, tp, ti in zip(s_prime, t_prime, t)),
        Fraction(0),
    )
    return Fraction(delta0, n) - Fraction(delta0_prime, n_prime) + bracket


def s2_from_counts(n, delta0, n_prime, delta0_prime, s_prime, t_prime, t) -> Fraction:
    if n_prime < 1:
        raise InvalidMatrix('S² needs a witness of positive rank')
    quotient = sum(
        (Fraction(n_prime - sp - tp + ti, n) for sp, tp, ti in zip(s_prime, t_prime, t)),
        Fraction(0),
    )
    slope_gap = Fraction(delta0, n) - Fraction(delta0_prime, n_prime)
    return slope_gap * (-Fraction(delta0, n) + quotient - HALF)


def _counts(model, wit, tol):
    invariants = subbundle_invariants(model, wit, tol)
    t = [t_i for _, t_i in plane_invariants(model, tol)]
    return [sp for sp, _ in invariants], [tp for _, tp in invariants], t


def S1(model: FramedBundleModel, wit: SubbundleWitness, tol: Optional[Tolerance] = None) -> Fraction:
    s_prime, t_prime, t = _counts(model, wit, tol)
    return s1_from_counts(model.n, model.delta0, wit.n_prime, wit.delta0_prime, s_prime, t_prime, t)


def S2(model: FramedBundleModel, wit: SubbundleWitness, tol: Optional[Tolerance] = None) -> Fraction:
    s_prime, t_prime, t = _counts(model, wit, tol)
    return s2_from_counts(model.n, model.delta0, wit.n_prime, wit.delta0_prime, s_prime, t_prime, t)


# ===== VERDICTS =====

def framing_bounds(model: FramedBundleModel, tol: Optional[Tolerance] = None) -> Tuple[Fraction, Fraction]:
    """Slack in Σs_i ≤ ℓn/2 - δ₀ and Σt_i ≤ ℓn/2 + δ₀; negative slack violates."""
    counts = plane_invariants(model, tol)
    half = Fraction(model.ell * model.n, 2)
    return (
        half - model.delta0 - sum(s for s, _ in counts),
        half + model.delta0 - sum(t for _, t in counts),
    )


def _bounds_verdict(bounds) -> Verdict:
    if all(b > 0 for b in bounds):
        return Verdict.STABLE
    if all(b >= 0 for b in bounds):
        return Verdict.SEMISTABLE
    return Verdict.UNSTABLE


def _witness_verdict(s1, s2) -> Verdict:
    if s1 > 0:
        return Verdict.STABLE
    if s1 < 0:
        return Verdict.UNSTABLE
    if s2 > 0:
        return Verdict.STABLE
    return Verdict.SEMISTABLE if s2 == 0 else Verdict.UNSTABLE


def _resolve_witnesses(model, witnesses, seed):
    if witnesses is not None:
        return list(witnesses)
    if model.n == 1:
        return []
    if model.split_type is not None:
        return enumerate_witnesses_genus0(model, samples=4, seed=seed)
    return []


def _certificate_status(model, witnesses) -> str:
    if model.n > 1 and not witnesses:
        logger.warning(
            f'No subbundle witnesses for a rank {model.n} model of genus {model.genus}; '
            f'verdict covers the framing bounds only'
        )
        return CertificateStatus.INCOMPLETE
    return CertificateStatus.COMPLETE


def check_semistable(model: FramedBundleModel, witnesses: Optional[Sequence[SubbundleWitness]] = None,
                     tol: Optional[Tolerance] = None, seed=None) -> StabilityRecord:
    """
    Framed (semi)stability: strict or non-strict framing bounds, then S¹ on
    every witness with S² breaking ties at S¹ = 0.
    """
    tol = resolve_tolerance(tol)
    witnesses = _resolve_witnesses(model, witnesses, seed)
    bounds = framing_bounds(model, tol)
    verdict = _bounds_verdict(bounds)
    details = [{'label': 'framing_bounds', 'slack': list(bounds), 'verdict': verdict.value}]
    violating, violating_index = (None, None)
    if verdict == Verdict.UNSTABLE:
        violating = 'framing_bounds'

    for index, wit in enumerate(witnesses):
        if wit.n_prime >= model.n:
            continue
        s1, s2 = S1(model, wit, tol), S2(model, wit, tol)
        contribution = _witness_verdict(s1, s2)
        logger.debug(f'Witness {index} ({wit.label}): S1={s1}, S2={s2} -> {contribution.value}')
        details.append({**wit.describe(), 'S1': s1, 'S2': s2, 'verdict': contribution.value})
        if contribution == Verdict.UNSTABLE and violating is None:
            violating, violating_index = wit, index
        verdict = verdict.combine(contribution)

    status = _certificate_status(model, witnesses)
    logger.info(f'Framed verdict {verdict.value} over {len(witnesses)} witnesses')
    return StabilityRecord(
        verdict=verdict,
        certificate_size=len(witnesses),
        violating_witness=violating,
        violating_index=violating_index,
        status=status,
        details=details,
    )


def pseudo_semistable(model: FramedBundleModel, witnesses: Optional[Sequence[SubbundleWitness]] = None,
                      tol: Optional[Tolerance] = None, seed=None) -> StabilityRecord:
    """S¹ ≥ 0 for every witness; the framing bounds and S² play no role."""
    tol = resolve_tolerance(tol)
    witnesses = _resolve_witnesses(model, witnesses, seed)
    verdict = Verdict.STABLE
    violating, violating_index = (None, None)
    details = []
    for index, wit in enumerate(witnesses):
        if wit.n_prime >= model.n:
            continue
        s1 = S1(model, wit, tol)
        contribution = Verdict.STABLE if s1 > 0 else (Verdict.SEMISTABLE if s1 == 0 else Verdict.UNSTABLE)
        details.append({**wit.describe(), 'S1': s1, 'verdict': contribution.value})
        if contribution == Verdict.UNSTABLE and violating is None:
            violating, violating_index = wit, index
        verdict = verdict.combine(contribution)
    return StabilityRecord(
        verdict=verdict,
        certificate_size=len(witnesses),
        violating_witness=violating,
        violating_index=violating_index,
        status=_certificate_status(model, witnesses),
        details=details,
    )


def slope_bound_check(model: FramedBundleModel) -> dict:
    """Which conclusions of the slope bound apply: H¹(E) = 0, and E globally generated."""
    slope = Fraction(model.delta0, model.n)
    base = (model.n - 1) * model.ell
    h1_threshold = 2 * model.genus - 2 + base
    generation_threshold = 2 * model.genus - 1 + base
    return {
        'slope': slope,
        'h1_threshold': h1_threshold,
        'generation_threshold': generation_threshold,
        'h1_vanishes': slope > h1_threshold,
        'globally_generated': slope > generation_threshold,
    }


# ===== TWISTS AND SATURATION =====

def twist(model: FramedBundleModel, c) -> FramedBundleModel:
    """E ⊗ O(c): the framings are carried over, δ₀ ↦ δ₀ + nc."""
    split_type = None if model.split_type is None else tuple(a + c for a in model.split_type)
    return replace(model, delta0=model.delta0 + model.n * c, split_type=split_type)


def twist_witness(wit: SubbundleWitness, c) -> SubbundleWitness:
    return replace(wit, delta0_prime=wit.delta0_prime + wit.n_prime * c)


def saturation_pair(model: FramedBundleModel, wit: SubbundleWitness, s_c: Sequence[int],
                    tol: Optional[Tolerance] = None) -> dict:
    """
    Compare a witness E' with the subbundle E^c it saturates to.

    E^c has the same fibers away from the torsion T, degree δ'₀ + δ(T) with
    δ(T) = Σ(s^c_i - s'_i), and s^c_i in place of s'_i. The returned gap
    S¹(E') - S¹(E^c) - δ(T)/n' is never negative and vanishes iff n' = n or
    T = 0.
    """
    s_prime, t_prime, t = _counts(model, wit, tol)
    if len(s_c) != len(s_prime) or any(c < sp for c, sp in zip(s_c, s_prime)):
        raise InvalidMatrix('Saturated counts must dominate s\'_i point by point')
    torsion = sum(c - sp for c, sp in zip(s_c, s_prime))
    saturated = replace(wit, delta0_prime=wit.delta0_prime + torsion, label=f'{wit.label}^sat')
    s1 = s1_from_counts(model.n, model.delta0, wit.n_prime, wit.delta0_prime, s_prime, t_prime, t)
    s1_sat = s1_from_counts(model.n, model.delta0, wit.n_prime, saturated.delta0_prime, s_c, t_prime, t)
    return {
        'witness': saturated,
        'torsion_degree': torsion,
        'S1': s1,
        'S1_saturated': s1_sat,
        'gap': s1 - s1_sat - Fraction(torsion, wit.n_prime),
    }


# ===== GENUS-0 WITNESS ENUMERATION =====

def marked_points(ell) -> List[int]:
    """Marked points of a split genus-0 model sit at 0, 1, ..., ℓ-1 on the affine line."""
    return list(range(ell))


def _random_fibers(split, degrees, points, rng, tol):
    """Fibers of the image of ⊕O(d_k) → ⊕O(a_j) under a random polynomial map, or None."""
    n = len(split)
    fibers = []
    coefficients = [
        [complex_gaussian(rng, (a - d + 1,)) if a >= d else None for d in degrees]
        for a in split
    ]
    for x in points:
        evaluated = np.zeros((n, len(degrees)), dtype=complex)
        for j in range(n):
            for k in range(len(degrees)):
                poly = coefficients[j][k]
                if poly is not None:
                    evaluated[j, k] = np.polyval(poly, x)
        if numeric_rank(evaluated, tol) < len(degrees):
            return None
        fibers.append(column_space(evaluated, tol))
    return fibers


def enumerate_witnesses_genus0(model: FramedBundleModel, samples=4, seed=None,
                               tol: Optional[Tolerance] = None) -> List[SubbundleWitness]:
    """
    Coordinate subbundles of the splitting plus ``samples`` random subsheaves
    per (n', δ'₀) with δ'₀ in [δ'₀_max - nℓ, δ'₀_max].
    """
    if model.split_type is None or model.genus != 0:
        raise UnsupportedModel('Witness enumeration needs a genus-0 split model')
    tol = resolve_tolerance(tol)
    seed = moduli_setting('DEFAULT_SEED') if seed is None else seed
    rng = make_rng(seed)
    n, split = model.n, list(model.split_type)
    points = marked_points(model.ell)
    witnesses = []

    for n_prime in range(1, n):
        for J in itertools.combinations(range(n), n_prime):
            fiber = np.eye(n, dtype=complex)[:, list(J)]
            witnesses.append(SubbundleWitness(
                n_prime=n_prime,
                delta0_prime=sum(split[j] for j in J),
                fibers=[fiber] * model.ell,
                label=f'O{tuple(split[j] for j in J)}',
            ))

    for n_prime in range(1, n):
        top = split[:n_prime]
        maximum = sum(top)
        for deficit in range(0, n * model.ell + 1):
            for sample in range(samples):
                shares = rng.multinomial(deficit, [1.0 / n_prime] * n_prime)
                degrees = [a - e for a, e in zip(top, shares)]
                fibers = _random_fibers(split, degrees, points, rng, tol)
                if fibers is None:
                    continue
                witnesses.append(SubbundleWitness(
                    n_prime=n_prime,
                    delta0_prime=maximum - deficit,
                    fibers=fibers,
                    label=f'random(n\'={n_prime}, d={maximum - deficit}, #{sample})',
                ))

    logger.info(f'Enumerated {len(witnesses)} genus-0 witnesses for split type {tuple(split)}')
    return witnesses
