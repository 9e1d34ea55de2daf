"""
The extended moduli space and its Grassmannian extension.

A point is (A_j, B_j, C_i, δ_i) with

    ∏_j [A_j, B_j] · exp(2π√−1 δ_1) · ∏_{i≥2} C_i exp(2π√−1 δ_i) C_i^{-1} = I,

[A, B] = A B A^{-1} B^{-1} and C_1 = I. The skew-Hermitian √−1·δ_i is stored
as the Hermitian δ_i throughout; this module is the only place where the
relation is assembled.
"""
import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from moduli.exceptions import InfeasibleDegree, InvalidMatrix, ResidualExceeded
from moduli.models import EMPoint, GMPoint
from moduli.services.linalg_core import (
    Tolerance, as_cmatrix, dagger, expm_hermitian, frobenius, haar_unitary,
    hermitian_part, make_rng, moduli_setting, numeric_rank, principal_log_unitary,
    resolve_tolerance,
)

logger = logging.getLogger(__name__)

HALF_I = 0.5j
TRACE_TOL = 1e-8
RANDOM_SPECTRUM_BOUND = 0.45
# eigenvalues this close to ±1/2 are treated as exactly on the boundary
BOUNDARY_SNAP = 1e-12
MAX_DEGREE_ATTEMPTS = 500


# ===== RELATION =====

def commutator(A, B) -> np.ndarray:
    return A @ B @ dagger(A) @ dagger(B)


def commutator_product(pt: EMPoint) -> np.ndarray:
    product = np.eye(pt.n, dtype=complex)
    for A, B in zip(pt.A, pt.B):
        product = product @ commutator(A, B)
    return product


def puncture_product(pt: EMPoint, start=1) -> np.ndarray:
    """∏_{i ≥ start} C_i exp(2π√−1 δ_i) C_i^{-1}"""
    product = np.eye(pt.n, dtype=complex)
    for C, delta in zip(pt.C[start:], pt.delta[start:]):
        if delta is None:
            raise InvalidMatrix('Relation needs every δ_i to be set')
        product = product @ C @ expm_hermitian(delta) @ dagger(C)
    return product


def relation_lhs(pt: EMPoint) -> np.ndarray:
    if pt.ell == 0:
        return commutator_product(pt)
    return commutator_product(pt) @ puncture_product(pt, start=0)


def relation_residual(pt: EMPoint) -> float:
    return frobenius(relation_lhs(pt) - np.eye(pt.n))


def solve_delta1(pt: EMPoint, tol: Optional[Tolerance] = None) -> EMPoint:
    """Isolate exp(2π√−1 δ_1) from the relation and take its principal logarithm."""
    tol = resolve_tolerance(tol)
    if pt.ell == 0:
        raise InvalidMatrix('No marked point to solve for')
    # exp(2π√−1 δ_1) = (∏[A, B])^{-1} (∏_{i≥2} C_i exp(2π√−1 δ_i) C_i^{-1})^{-1}
    isolated = dagger(commutator_product(pt)) @ dagger(puncture_product(pt, start=1))
    delta1 = principal_log_unitary(isolated, tol)
    solved = pt.with_delta(0, delta1)
    residual = relation_residual(solved)
    if residual > tol.residual_abs:
        logger.error(f'Solved δ_1 leaves relation residual {residual:.3e}')
        raise ResidualExceeded(
            f'Relation residual {residual:.3e} exceeds {tol.residual_abs:.1e}',
            residual=residual,
        )
    return solved


def em_moment(pt: EMPoint) -> List[np.ndarray]:
    """Hermitian moment values (δ_1, ..., δ_ℓ)."""
    return [None if d is None else d.copy() for d in pt.delta]


def act(pt, unitaries: Sequence):
    """
    U(n)^ℓ action: A_j, B_j ↦ g_1 · g_1^{-1}, C_i ↦ g_1 C_i g_i^{-1},
    δ_i ↦ g_i δ_i g_i^{-1}; on GM points b_i* ↦ b_i* g_i^{-1}.
    """
    em = pt.em if isinstance(pt, GMPoint) else pt
    gs = [as_cmatrix(g, 'g') for g in unitaries]
    if len(gs) != em.ell:
        raise InvalidMatrix(f'Action needs {em.ell} unitaries, got {len(gs)}')
    g1 = gs[0]
    moved = EMPoint(
        n=em.n,
        genus=em.genus,
        A=[g1 @ A @ dagger(g1) for A in em.A],
        B=[g1 @ B @ dagger(g1) for B in em.B],
        C=[g1 @ C @ dagger(g) for C, g in zip(em.C, gs)],
        delta=[None if d is None else g @ d @ dagger(g) for d, g in zip(em.delta, gs)],
    )
    if not isinstance(pt, GMPoint):
        return moved
    return GMPoint(
        em=moved,
        b_star=[b @ dagger(g) for b, g in zip(pt.b_star, gs)],
        d_star=pt.d_star,
        delta0=pt.delta0,
    )


# ===== GRASSMANNIAN LEVEL =====

def gm_level_residual(pt: GMPoint) -> float:
    """max_i ‖δ_i − (1/2)(I − 2bb*)‖ with bb* = b_i*^H b_i*."""
    residuals = [
        frobenius(delta - 0.5 * (np.eye(pt.n) - 2 * dagger(b) @ b))
        for b, delta in zip(pt.b_star, pt.delta)
    ]
    return max(residuals, default=0.0)


def gm_right_moment(pt: GMPoint) -> List[np.ndarray]:
    """(√−1/2)(I − 2dd*) per point."""
    return [HALF_I * hermitian_part(np.eye(pt.n) - 2 * dagger(d) @ d) for d in pt.d_star]


def level_planes(delta, rng) -> Tuple[np.ndarray, np.ndarray]:
    """
    Annihilator rows (b*, d*) on the level set of δ:
    b* = X (I/2 − Λ)^{1/2} V^H, d* = X (I/2 + Λ)^{1/2} W^H for δ = V Λ V^H.
    """
    delta = hermitian_part(as_cmatrix(delta, 'delta'))
    n = delta.shape[0]
    values, V = np.linalg.eigh(delta)
    values = np.clip(values, -0.5, 0.5)
    values[np.abs(values - 0.5) <= BOUNDARY_SNAP] = 0.5
    values[np.abs(values + 0.5) <= BOUNDARY_SNAP] = -0.5
    X, W = haar_unitary(n, rng), haar_unitary(n, rng)
    b_star = X @ np.diag(np.sqrt(0.5 - values)) @ dagger(V)
    d_star = X @ np.diag(np.sqrt(0.5 + values)) @ dagger(W)
    return b_star, d_star


def boundary_multiplicities(delta, cluster_tol=None) -> Tuple[int, int]:
    """(# eigenvalues at +1/2, # eigenvalues at −1/2)"""
    cluster_tol = moduli_setting('EIGEN_CLUSTER_TOL') if cluster_tol is None else cluster_tol
    spectrum = np.linalg.eigvalsh(hermitian_part(as_cmatrix(delta, 'delta')))
    return (
        int(np.count_nonzero(np.abs(spectrum - 0.5) <= cluster_tol)),
        int(np.count_nonzero(np.abs(spectrum + 0.5) <= cluster_tol)),
    )


def eigenspace_identity(pt: GMPoint, tol: Optional[Tolerance] = None) -> List[dict]:
    """Per point: +1/2 and −1/2 multiplicities of δ_i against dim ker b_i* and dim ker d_i*."""
    tol = resolve_tolerance(tol)
    out = []
    for b, d, delta in zip(pt.b_star, pt.d_star, pt.delta):
        plus, minus = boundary_multiplicities(delta)
        out.append({
            'plus_half': plus,
            'kernel_b': pt.n - numeric_rank(b, tol),
            'minus_half': minus,
            'kernel_d': pt.n - numeric_rank(d, tol),
        })
    return out


# ===== TRACES AND HYPOTHESES =====

def trace_checks(pt: GMPoint, delta0=None) -> dict:
    """
    Σ tr δ_i is an integer equal to −δ₀; Σ tr(I/2 + δ_i) = nℓ/2 − δ₀; and
    the framing bounds Σ s_i ≤ ℓn/2 − δ₀, Σ t_i ≤ ℓn/2 + δ₀ that follow.
    """
    delta0 = pt.delta0 if delta0 is None else delta0
    n, ell = pt.n, pt.ell
    total = float(sum(np.real(np.trace(d)) for d in pt.delta))
    shifted = float(sum(np.real(np.trace(0.5 * np.eye(n) + d)) for d in pt.delta))
    multiplicities = [boundary_multiplicities(d) for d in pt.delta]
    half = Fraction(ell * n, 2)
    determinant = np.linalg.det(relation_lhs(pt.em)) if ell else 1.0
    return {
        'trace_sum': total,
        'integral': abs(total - round(total)) <= TRACE_TOL,
        'matches_degree': abs(total + delta0) <= TRACE_TOL,
        'shifted_trace': shifted,
        'shifted_identity': abs(shifted - (float(half) - delta0)) <= TRACE_TOL,
        'determinant_residual': float(abs(determinant - np.exp(2j * np.pi * total))),
        's_bound': sum(s for s, _ in multiplicities) <= half - delta0,
        't_bound': sum(t for _, t in multiplicities) <= half + delta0,
    }


def _generators(em: EMPoint) -> List[np.ndarray]:
    gens = list(em.A) + list(em.B) + list(em.C[1:])
    gens += [d for d in em.delta if d is not None]
    return gens


def is_irreducible(em: EMPoint, words=None, seed=None, max_length=6, tol: Optional[Tolerance] = None) -> bool:
    """
    No common invariant subspace: random words of length ≤ max_length in the
    generators span all of M_n (Burnside).
    """
    tol = resolve_tolerance(tol)
    n = em.n
    if n == 1:
        return True
    gens = _generators(em)
    if not gens:
        return False
    words = moduli_setting('IRREDUCIBILITY_WORDS') if words is None else words
    seed = moduli_setting('DEFAULT_SEED') if seed is None else seed
    rng = make_rng(seed)
    samples = [np.eye(n, dtype=complex).ravel()]
    for _ in range(max(words, 4 * n * n)):
        word = np.eye(n, dtype=complex)
        for index in rng.integers(0, len(gens), size=int(rng.integers(1, max_length + 1))):
            word = word @ gens[index]
        samples.append(word.ravel())
    return numeric_rank(np.array(samples), tol) == n * n


def smoothness_hypotheses(pt: GMPoint, seed=None, tol: Optional[Tolerance] = None) -> dict:
    cluster_tol = moduli_setting('EIGEN_CLUSTER_TOL')
    spectra = [np.linalg.eigvalsh(d) for d in pt.delta if d is not None]
    interior = [np.all(np.abs(s) < 0.5 - cluster_tol) for s in spectra]
    off_boundary = [np.any(np.abs(np.abs(s) - 0.5) > cluster_tol) for s in spectra]
    return {
        'interior_delta': bool(any(interior)),
        'non_boundary_eigenvalue': bool(any(off_boundary)),
        'irreducible': is_irreducible(pt.em, seed=seed, tol=tol),
    }


# ===== RANDOM POINTS =====

def _random_em(n, genus, ell, rng, center=0.0, tol=None) -> EMPoint:
    A = [haar_unitary(n, rng) for _ in range(genus)]
    B = [haar_unitary(n, rng) for _ in range(genus)]
    C = [np.eye(n, dtype=complex)] + [haar_unitary(n, rng) for _ in range(ell - 1)]
    low, high = -RANDOM_SPECTRUM_BOUND, RANDOM_SPECTRUM_BOUND
    delta = [None]
    for _ in range(ell - 1):
        spectrum = np.clip(center + rng.uniform(-0.2, 0.2, size=n), low, high)
        U = haar_unitary(n, rng)
        delta.append(hermitian_part((U * spectrum) @ dagger(U)))
    return solve_delta1(EMPoint(n=n, genus=genus, A=A, B=B, C=C, delta=delta), tol)


def random_gm_point(n, genus, ell, delta0=None, seed=None, tol: Optional[Tolerance] = None) -> GMPoint:
    """
    Haar holonomies, random δ_i (i ≥ 2) with spectrum in (−0.45, 0.45), δ_1
    solved, and level planes for every δ_i. With ``delta0`` given, draws are
    repeated until Σ tr δ_i = −δ₀; otherwise δ₀ is read off the traces.
    """
    tol = resolve_tolerance(tol)
    if ell < 1:
        raise InvalidMatrix('A GM point needs at least one marked point')
    if delta0 is not None and abs(delta0) > Fraction(ell * n, 2):
        raise InfeasibleDegree(f'|δ₀| = {abs(delta0)} exceeds ℓn/2 = {Fraction(ell * n, 2)}')
    seed = moduli_setting('DEFAULT_SEED') if seed is None else seed
    rng = make_rng(seed)
    center = 0.0 if delta0 is None or ell == 1 else float(np.clip(-delta0 / (n * ell), -0.25, 0.25))

    attempts = 1 if delta0 is None else MAX_DEGREE_ATTEMPTS
    for _ in range(attempts):
        em = _random_em(n, genus, ell, rng, center, tol)
        total = int(round(float(sum(np.real(np.trace(d)) for d in em.delta))))
        if delta0 is None or total == -delta0:
            break
    else:
        raise InfeasibleDegree(f'No random point with Σ tr δ_i = {-delta0} after {attempts} draws')

    planes = [level_planes(d, rng) for d in em.delta]
    point = GMPoint(
        em=em,
        b_star=[b for b, _ in planes],
        d_star=[d for _, d in planes],
        delta0=-total,
    )
    logger.info(f'Random GM point n={n} g={genus} ℓ={ell} δ₀={point.delta0} (seed {seed})')
    return point
