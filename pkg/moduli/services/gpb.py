"""
Generalized parabolic bundles: an n-plane g_i ⊂ E_{p_i} ⊕ E_{q_i} over each
pair of points, obtained by composing the framings g^p_i and g^q_i through
the common C^n.
"""
import itertools
import logging
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from moduli.exceptions import DiagonalKernel, InvalidMatrix, MomentMismatch, SpanDeficient
from moduli.models import (
    CertificateStatus, DestabilizingCertificate, FramedEncoding, GPBPlane, GPBundle,
    Plane, PluckerVector, StabilityRecord, SubbundleWitness, Verdict,
)
from moduli.services.git_weights import minors_weight, plucker_weight
from moduli.services.grassmann import canonical_gauge, plane_from_annihilator, plucker_from_basis
from moduli.services.linalg_core import (
    Tolerance, as_cmatrix, column_space, dagger, frobenius, hermitian_inv_sqrt,
    intersection_dim, nearest_unitary, null_space, numeric_rank, orthogonal_complement,
    resolve_tolerance, subspace_intersection,
)

logger = logging.getLogger(__name__)


# ===== COMPOSITION =====

def framing_kernel(g: Plane, tol: Optional[Tolerance] = None) -> np.ndarray:
    """g ∩ (0 ⊕ C^n), as vectors of C^n."""
    second = np.vstack([np.zeros((g.m, g.n)), np.eye(g.n)])
    return subspace_intersection(g.basis, second, tol)[g.m:]


def compose_planes(gp: Plane, gq: Plane, tol: Optional[Tolerance] = None) -> GPBPlane:
    """
    R((g^p ⊕ g^q) ∩ (E_p ⊕ E_q ⊕ Δ)): pairs (x_p, x_q) joined by a common
    framing vector. Needs R^p(g^p) + R^q(g^q) = C^n and g^p ∩ C^n ∩ g^q = 0.
    """
    tol = resolve_tolerance(tol)
    n = gp.n
    if (gp.m, gp.k, gq.m, gq.n, gq.k) != (n, n, n, n, n):
        raise InvalidMatrix('Composition needs two n-planes in C^n ⊕ C^n')
    P1, P2 = gp.first_block, gp.second_block
    Q1, Q2 = gq.first_block, gq.second_block
    if numeric_rank(np.hstack([P2, Q2]), tol) < n:
        raise SpanDeficient('R^p(g^p) + R^q(g^q) does not span C^n')
    common = intersection_dim(framing_kernel(gp, tol), framing_kernel(gq, tol), tol)
    if common:
        raise DiagonalKernel(f'g^p ∩ C^n ∩ g^q has dimension {common}')
    matched = null_space(np.hstack([P2, -Q2]), tol)
    images = np.vstack([P1 @ matched[:n], Q1 @ matched[n:]])
    basis = column_space(images, tol)
    if basis.shape[1] != n:
        raise DiagonalKernel(f'Composed plane has dimension {basis.shape[1]}, expected {n}')
    return GPBPlane(plane=Plane(m=n, n=n, basis=basis))


def _permutation_sign(sequence) -> int:
    sign = 1
    items = list(sequence)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def plucker_compose(beta_p: PluckerVector, beta_q: PluckerVector,
                    tol: Optional[Tolerance] = None) -> PluckerVector:
    """
    Contract β^p ∧ β^q with the covolume of the shared C^n.

    Coordinates of β^p index E_p ⊕ C^n and those of β^q index E_q ⊕ C^n;
    both are placed in E_p ⊕ E_q ⊕ C^n, β^q with the framing reversed so that
    the common framing vector cancels. The result indexes E_p ⊕ E_q.
    """
    tol = resolve_tolerance(tol)
    n = beta_p.k
    if beta_q.k != n or beta_p.ambient != 2 * n or beta_q.ambient != 2 * n:
        raise InvalidMatrix('Plücker composition needs two n-planes in C^n ⊕ C^n')

    def lift(vector, offset, flip):
        out = {}
        for subset, coord in zip(vector.subsets, vector.coords):
            lifted = tuple(i + offset if i < n else i + n for i in subset)
            framing = sum(1 for i in subset if i >= n)
            out[lifted] = coord * ((-1) ** framing if flip else 1)
        return out

    left, right = lift(beta_p, 0, False), lift(beta_q, n, True)
    wedge = {}
    for S, a in left.items():
        if a == 0:
            continue
        for T, b in right.items():
            if b == 0 or set(S) & set(T):
                continue
            U = tuple(sorted(S + T))
            wedge[U] = wedge.get(U, 0) + _permutation_sign(S + T) * a * b

    framing = tuple(range(2 * n, 3 * n))
    subsets = tuple(itertools.combinations(range(2 * n), n))
    coords = np.array([wedge.get(J + framing, 0) for J in subsets], dtype=complex)
    if np.linalg.norm(coords) <= tol.rank_rel:
        raise DiagonalKernel('β^p ∧ β^q contracts to zero')
    return PluckerVector(k=n, coords=canonical_gauge(coords, tol), ambient=2 * n, subsets=subsets)


def unitary_compose(bp_star, dp_star, bq_star, dq_star, tol: Optional[Tolerance] = None):
    """
    Annihilator rows of the composed plane from the two level planes.

    With d_p d_p* + d_q d_q* = I, diagonalize u d_p d_p* u^{-1} = D, rotate
    rows so that u_p d_p* u^H = √D and u_q d_q* u^H = √(I − D); the rows

        ((I − D)² + D²)^{-1/2} ( √(I − D) u_p b_p*, −√D u_q b_q* )

    are orthonormal and cut out the composed plane. Returns (rows, D).
    """
    tol = resolve_tolerance(tol)
    bp, dp, bq, dq = (as_cmatrix(M, name) for M, name in (
        (bp_star, 'bp_star'), (dp_star, 'dp_star'), (bq_star, 'bq_star'), (dq_star, 'dq_star')))
    n = dp.shape[1]
    gram_p = dagger(dp) @ dp
    defect = frobenius(gram_p + dagger(dq) @ dq - np.eye(n))
    if defect > tol.residual_abs:
        raise MomentMismatch(f'd_p d_p* + d_q d_q* differs from I by {defect:.3e}')

    values, vectors = np.linalg.eigh(gram_p)
    D = np.clip(values, 0.0, 1.0)
    u = dagger(vectors)
    u_p = _row_rotation(dp @ dagger(u), np.sqrt(D))
    u_q = _row_rotation(dq @ dagger(u), np.sqrt(1.0 - D))
    rows = np.hstack([
        np.diag(np.sqrt(1.0 - D)) @ u_p @ bp,
        -np.diag(np.sqrt(D)) @ u_q @ bq,
    ])
    rows = hermitian_inv_sqrt(np.diag((1.0 - D) ** 2 + D ** 2)) @ rows
    return rows, np.diag(D)


def _row_rotation(X, widths, threshold=1e-7) -> np.ndarray:
    """Unitary u with u X = diag(widths), X having orthogonal columns of those norms."""
    n = X.shape[1]
    columns = [X[:, j] / widths[j] if widths[j] > threshold else None for j in range(n)]
    filled = [c for c in columns if c is not None]
    for j, column in enumerate(columns):
        if column is not None:
            continue
        basis = np.array(filled).T if filled else np.zeros((n, 0), dtype=complex)
        residuals = np.eye(n, dtype=complex) - basis @ dagger(basis)
        k = int(np.argmax(np.linalg.norm(residuals, axis=0)))
        columns[j] = residuals[:, k] / np.linalg.norm(residuals[:, k])
        filled.append(columns[j])
    return dagger(nearest_unitary(np.array(columns).T))


def unitary_compose_plane(bp_star, dp_star, bq_star, dq_star, tol: Optional[Tolerance] = None) -> Plane:
    rows, _ = unitary_compose(bp_star, dp_star, bq_star, dq_star, tol)
    n = rows.shape[0]
    return plane_from_annihilator(rows[:, :n], rows[:, n:], tol)


# ===== STABILITY =====

def gpb_pardeg(bundle: GPBundle, wit: Optional[SubbundleWitness] = None,
               tol: Optional[Tolerance] = None) -> Fraction:
    """δ'₀ + Σ_i (dim((E'_p ⊕ E'_q) ∩ g_i) − n'); the whole bundle when wit is None."""
    tol = resolve_tolerance(tol)
    if wit is None:
        return Fraction(bundle.delta0)
    if wit.fibers_q is None or len(wit.fibers) != bundle.ell or len(wit.fibers_q) != bundle.ell:
        raise InvalidMatrix('GPB witnesses need fibers at both points of every pair')
    total = Fraction(wit.delta0_prime)
    for g, fp, fq in zip(bundle.planes, wit.fibers, wit.fibers_q):
        pair = np.vstack([
            np.hstack([fp, np.zeros_like(fq)]),
            np.hstack([np.zeros_like(fp), fq]),
        ])
        total += intersection_dim(g.plane.basis, pair, tol) - wit.n_prime
    return total


def gpb_semistable(bundle: GPBundle, witnesses: Sequence[SubbundleWitness],
                   tol: Optional[Tolerance] = None) -> StabilityRecord:
    tol = resolve_tolerance(tol)
    slope = gpb_pardeg(bundle) / bundle.n
    verdict = Verdict.STABLE
    violating, violating_index = (None, None)
    details = []
    for index, wit in enumerate(witnesses):
        if wit.n_prime >= bundle.n:
            continue
        gap = slope - gpb_pardeg(bundle, wit, tol) / wit.n_prime
        contribution = Verdict.STABLE if gap > 0 else (Verdict.SEMISTABLE if gap == 0 else Verdict.UNSTABLE)
        details.append({**wit.describe(), 'slope_gap': gap, 'verdict': contribution.value})
        if contribution == Verdict.UNSTABLE and violating is None:
            violating, violating_index = wit, index
        verdict = verdict.combine(contribution)
    status = CertificateStatus.COMPLETE
    if bundle.n > 1 and not witnesses:
        logger.warning('GPB verdict requested without witnesses')
        status = CertificateStatus.INCOMPLETE
    return StabilityRecord(
        verdict=verdict,
        certificate_size=len(witnesses),
        violating_witness=violating,
        violating_index=violating_index,
        status=status,
        details=details,
    )


def degree_bound_ok(n, ell, delta0) -> bool:
    """δ₀ ≤ 2ℓ + n/2, the degree range where semistable GPBs lift."""
    return delta0 <= 2 * ell + Fraction(n, 2)


def inequality_chain(bundle: GPBundle, wit: SubbundleWitness, tol: Optional[Tolerance] = None) -> dict:
    """
    For graph planes: the stability gap, its lower bound from
    dim((E'_p ⊕ E'_q) ∩ g_i) ≥ max(0, 2n' − n), and the framed bound
    δ₀/n − δ'₀/n' + 2ℓ(n − n')/n.
    """
    n, n_prime, ell = bundle.n, wit.n_prime, bundle.ell
    base = Fraction(bundle.delta0, n) - Fraction(wit.delta0_prime, n_prime)
    gap = Fraction(bundle.delta0, n) - gpb_pardeg(bundle, wit, tol) / n_prime
    middle = base + Fraction(ell * (n_prime - max(0, 2 * n_prime - n)), n_prime)
    upper = base + Fraction(2 * ell * (n - n_prime), n)
    return {
        'gap': gap,
        'middle': middle,
        'upper': upper,
        'holds': gap <= middle <= upper,
        'strict': 0 < gap <= middle <= upper,
    }


# ===== DESTABILIZING ONE-PARAMETER SUBGROUPS =====

def find_destabilizing_1ps(enc: FramedEncoding, common_vector, pair=(0, 1),
                           tol: Optional[Tolerance] = None) -> Optional[DestabilizingCertificate]:
    """
    One-parameter subgroup of S(GL(p) × GL(n)) driving α, β^p and β^q to zero
    when e₁ ∈ g^p ∩ C^n ∩ g^q: weight −1 on V* and on e₂*, ..., e_n*, and
    p + n − 1 on e₁*, in a framing basis starting with e₁. Returns None when
    the vector is not common to both planes.
    """
    tol = resolve_tolerance(tol)
    e1 = np.asarray(common_vector, dtype=complex).reshape(-1, 1)
    norm = np.linalg.norm(e1)
    if norm == 0.0:
        return None
    e1 = e1 / norm
    betas = [enc.beta[i] for i in pair]
    for beta in betas:
        if np.linalg.norm(beta.second_block.T @ e1) > tol.residual_abs:
            logger.info('Common vector does not lie in both framings; no certificate')
            return None

    frame = np.hstack([e1, orthogonal_complement(e1, tol)])
    p, n = enc.p, enc.n
    weights_V = [-1] * p
    weights_framing = [p + n - 1] + [-1] * (n - 1)
    limit_weights = [Fraction(minors_weight(enc.ev[pair[0]], weights_V, tol))]
    for beta in betas:
        adapted = np.vstack([beta.first_block, frame.T @ beta.second_block])
        vector = plucker_from_basis(adapted, tol)
        limit_weights.append(Fraction(plucker_weight(vector, weights_V + weights_framing, tol)))
    certificate = DestabilizingCertificate(
        weights_V=weights_V,
        weights_framing=weights_framing,
        limit_weights=limit_weights,
        common_vector=e1.ravel(),
    )
    logger.info(f'Destabilizing 1-PS limit weights {limit_weights}')
    return certificate
