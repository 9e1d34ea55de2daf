"""
Local model of the symplectic/holomorphic dictionary.

Planes g_i ⊂ E_{p_i} ⊕ C^n induce flags in the fibers; moment values δ_i
give weights; together they are parabolic data. Only the local model is
built here (flags, weights, transferred planes, normal forms): no global
bundle is ever constructed.
"""
import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from moduli.exceptions import (
    BoundaryDegenerate, InvalidMatrix, MomentMismatch, NothingToShift,
)
from moduli.models import (
    CertificateStatus, FramedBundleModel, FramedEncoding, GMPoint, NormalFormResult,
    ParabolicData, Plane, PointParabolic, StabilityRecord, SubbundleWitness, Verdict,
)
from moduli.services.grassmann import (
    HALF_I, act_first, act_second, hermitian_moment, moment_left, plane_to_annihilator,
)
from moduli.services.linalg_core import (
    Tolerance, as_cmatrix, column_space, dagger, expm_hermitian, frobenius,
    hermitian_part, hermitian_sqrt, intersection_dim, moduli_setting,
    nearest_unitary, numeric_rank, orthogonal_complement, resolve_tolerance,
    subspace_intersection,
)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
WEIGHT_DENOMINATOR = 10 ** 9


# ===== FLAGS AND WEIGHTS =====

def induced_flag(g: Plane, framing_basis=None, tol: Optional[Tolerance] = None) -> List[np.ndarray]:
    """
    F_{-1} = 0, F_j = Π(g ∩ R^{-1}(C^j)) for j = 0..n, F_{n+1} = E.

    C^j is spanned by the first j columns of ``framing_basis`` (standard
    basis by default), so F_0 = g ∩ E and F_n = Π(g).
    """
    tol = resolve_tolerance(tol)
    m, n = g.m, g.n
    frame = np.eye(n, dtype=complex) if framing_basis is None else as_cmatrix(framing_basis, 'framing_basis')
    flag = [np.zeros((m, 0), dtype=complex)]
    for j in range(n + 1):
        preimage = np.vstack([
            np.hstack([np.eye(m), np.zeros((m, j))]),
            np.hstack([np.zeros((n, m)), frame[:, :j]]),
        ])
        meet = subspace_intersection(g.basis, preimage, tol)
        flag.append(column_space(meet[:m], tol))
    flag.append(np.eye(m, dtype=complex))
    return flag


def exact_weight(value) -> Fraction:
    return Fraction(float(value)).limit_denominator(WEIGHT_DENOMINATOR)


def sorted_spectrum(delta, tol: Optional[Tolerance] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in weakly decreasing order with eigenvectors; a sorted diagonal δ keeps V = I."""
    tol = resolve_tolerance(tol)
    delta = hermitian_part(as_cmatrix(delta, 'delta'))
    diagonal = np.real(np.diag(delta))
    off_diagonal = frobenius(delta - np.diag(np.diag(delta)))
    if off_diagonal <= tol.residual_abs and np.all(np.diff(diagonal) <= 0):
        return diagonal.copy(), np.eye(delta.shape[0], dtype=complex)
    values, vectors = linalg.eigh(delta)
    return values[::-1], vectors[:, ::-1]


def weights_from_moment(delta, cluster_tol=None, tol: Optional[Tolerance] = None):
    """
    Weakly decreasing eigenvalues of δ clustered into blocks.

    Returns (values, vectors, blocks) with blocks a list of (weight, multiplicity);
    clusters within cluster_tol of ±1/2 are snapped to ±1/2 exactly.
    """
    cluster_tol = moduli_setting('EIGEN_CLUSTER_TOL') if cluster_tol is None else cluster_tol
    values, vectors = sorted_spectrum(delta, tol)
    clusters = []
    for value in values:
        if clusters and abs(clusters[-1][-1] - value) <= cluster_tol:
            clusters[-1].append(value)
        else:
            clusters.append([value])
    blocks = []
    snapped = []
    for cluster in clusters:
        center = float(np.mean(cluster))
        if abs(center - 0.5) <= cluster_tol:
            weight = HALF
        elif abs(center + 0.5) <= cluster_tol:
            weight = -HALF
        else:
            weight = exact_weight(center)
        blocks.append((weight, len(cluster)))
        snapped.extend([float(weight)] * len(cluster))
    return np.array(snapped), vectors, blocks


def vertex_weights(n, k) -> Tuple[Fraction, ...]:
    """Simplex vertex α_0 = ... = α_k = 1/2, α_{k+1} = ... = α_{n+1} = -1/2."""
    if not 0 <= k <= n:
        raise InvalidMatrix(f'Vertex index {k} outside 0..{n}')
    return tuple([HALF] * (k + 1) + [-HALF] * (n + 1 - k))


def parabolic_from_model(model: FramedBundleModel, weights: Sequence[Sequence],
                         framing_bases=None, tol: Optional[Tolerance] = None) -> ParabolicData:
    frames = framing_bases or [None] * model.ell
    return ParabolicData(points=[
        PointParabolic(n=model.n, flag=induced_flag(g, frame, tol), weights=w)
        for g, frame, w in zip(model.g, frames, weights)
    ])


# ===== PARABOLIC DEGREE =====

def _weighted_jumps(dims, weights) -> Fraction:
    return sum(
        ((dims[j + 1] - dims[j]) * weights[j] for j in range(len(weights))),
        Fraction(0),
    )


def pardeg(delta0, parabolic: ParabolicData) -> Fraction:
    return delta0 + sum(
        (_weighted_jumps(point.dims, point.weights) for point in parabolic.points),
        Fraction(0),
    )


def subbundle_flag_dims(fibers, parabolic: ParabolicData, tol: Optional[Tolerance] = None) -> List[List[int]]:
    """dim F'_{i,j} = dim(F_{i,j} ∩ E'_{p_i}) for every point and level."""
    tol = resolve_tolerance(tol)
    return [
        [intersection_dim(F, fiber, tol) for F in point.flag]
        for point, fiber in zip(parabolic.points, fibers)
    ]


def subbundle_pardeg(delta0_prime, fibers, parabolic: ParabolicData,
                     tol: Optional[Tolerance] = None) -> Fraction:
    dims = subbundle_flag_dims(fibers, parabolic, tol)
    return delta0_prime + sum(
        (_weighted_jumps(d, point.weights) for d, point in zip(dims, parabolic.points)),
        Fraction(0),
    )


def vertex_pardeg(delta0, dims_per_point, ks) -> Fraction:
    """
    Parabolic degree at the simplex vertex ``ks`` from flag dimensions alone:
    δ₀ + Σ_i [(m_{k_i} + s_i) - (r_i - m_{k_i} + t_i)]/2.
    """
    total = Fraction(delta0)
    for dims, k in zip(dims_per_point, ks):
        rank = dims[-1]
        s = dims[1]
        m_k = dims[k + 1] - s
        r = dims[-2] - s
        t = rank - dims[-2]
        total += HALF * (m_k + s) - HALF * (r - m_k + t)
    return total


def parabolic_semistable(model: FramedBundleModel, parabolic: ParabolicData,
                         witnesses: Sequence[SubbundleWitness],
                         tol: Optional[Tolerance] = None) -> StabilityRecord:
    """Slope comparison pardeg(E)/n - pardeg(E')/n' over the witness list."""
    tol = resolve_tolerance(tol)
    total = pardeg(model.delta0, parabolic) / model.n
    verdict = Verdict.STABLE
    violating, violating_index = (None, None)
    details = []
    for index, wit in enumerate(witnesses):
        if wit.n_prime >= model.n:
            continue
        gap = total - subbundle_pardeg(wit.delta0_prime, wit.fibers, parabolic, tol) / wit.n_prime
        contribution = Verdict.STABLE if gap > 0 else (Verdict.SEMISTABLE if gap == 0 else Verdict.UNSTABLE)
        details.append({**wit.describe(), 'slope_gap': gap, 'verdict': contribution.value})
        if contribution == Verdict.UNSTABLE and violating is None:
            violating, violating_index = wit, index
        verdict = verdict.combine(contribution)
    status = CertificateStatus.COMPLETE
    if model.n > 1 and not witnesses:
        logger.warning('Parabolic verdict requested without witnesses')
        status = CertificateStatus.INCOMPLETE
    return StabilityRecord(
        verdict=verdict,
        certificate_size=len(witnesses),
        violating_witness=violating,
        violating_index=violating_index,
        status=status,
        details=details,
    )


# ===== HECKE TRANSFORM =====

def hecke_shift(parabolic: ParabolicData, delta0, point=0,
                tol: Optional[Tolerance] = None) -> Tuple[ParabolicData, int]:
    """
    Trade the weight-1/2 block F_0 at one point for a weight -1/2 block.

    The new flag is F_j ∩ F_0^⊥ below the top, so every middle jump is kept,
    F_0 becomes zero and the top quotient grows by s = dim F_0; the degree
    moves to δ₀ + s and the parabolic degree is unchanged.
    """
    tol = resolve_tolerance(tol)
    target = parabolic.points[point]
    s = target.s
    if s == 0:
        raise NothingToShift(f'Point {point} has no weight-1/2 block')
    complement = orthogonal_complement(target.flag[1], tol)
    flag = [subspace_intersection(F, complement, tol) for F in target.flag[:-1]]
    flag.append(target.flag[-1])
    shifted = PointParabolic(n=target.n, flag=flag, weights=target.weights)
    points = list(parabolic.points)
    points[point] = shifted
    logger.info(f'Hecke shift at point {point}: s={s}, degree {delta0} -> {delta0 + s}')
    return ParabolicData(points=points), delta0 + s


# ===== MOMENT MAPS ON ENCODINGS =====

def moduli_moment(enc: FramedEncoding, tol: Optional[Tolerance] = None) -> List[np.ndarray]:
    """(√−1/2)(−I + 2dd*) per point, d* the C^n block of β_i's annihilator rows."""
    values = []
    for beta in enc.beta:
        _, d_star = plane_to_annihilator(beta, tol)
        values.append(HALF_I * hermitian_part(-np.eye(enc.n) + 2 * dagger(d_star) @ d_star))
    return values


def moduli_moment_graph(xi) -> np.ndarray:
    """Graph form (√−1/2)(ξ*ξ − I)(I + ξ*ξ)^{-1} for β = {(ξy, y)}, ξ: C^n → V*."""
    xi = as_cmatrix(xi, 'xi')
    n = xi.shape[1]
    gram = dagger(xi) @ xi
    return HALF_I * hermitian_part((gram - np.eye(n)) @ np.linalg.inv(np.eye(n) + gram))


# ===== NORMAL FORM =====

def _complete_columns(columns, size):
    """Fill the None slots with standard vectors of largest residual, then snap to a unitary."""
    filled = [c for c in columns if c is not None]
    result = list(columns)
    for index, column in enumerate(columns):
        if column is not None:
            continue
        basis = np.array(filled).T if filled else np.zeros((size, 0), dtype=complex)
        residuals = np.eye(size, dtype=complex) - basis @ dagger(basis)
        k = int(np.argmax(np.linalg.norm(residuals, axis=0)))
        vector = residuals[:, k] / np.linalg.norm(residuals[:, k])
        filled.append(vector)
        result[index] = vector
    return nearest_unitary(np.array(result).T)


def normal_form(plane: Plane, delta, tol: Optional[Tolerance] = None, cluster_tol=None) -> NormalFormResult:
    """
    Bring a plane with Hermitian moment -√−1·moment_left(plane) = δ to the block form

        ρ* = ( diag(0, M, I) | diag(I, (I/2 + δ̂)^{1/2}, 0) ),  M = (I/2 - δ̂)^{1/2}

    over the s / r / t blocks of eigenvalues 1/2, interior, -1/2.
    """
    tol = resolve_tolerance(tol)
    cluster_tol = moduli_setting('EIGEN_CLUSTER_TOL') if cluster_tol is None else cluster_tol
    delta = hermitian_part(as_cmatrix(delta, 'delta'))
    n = plane.n
    if (plane.m, plane.k) != (n, n) or delta.shape != (n, n):
        raise InvalidMatrix('Normal form needs an n-plane in C^n ⊕ C^n and an n x n δ')
    mismatch = frobenius(hermitian_moment(moment_left(plane, tol)) - delta)
    if mismatch > tol.residual_abs:
        raise MomentMismatch(f'Plane moment differs from δ by {mismatch:.3e}')

    values, V, blocks = weights_from_moment(delta, cluster_tol, tol)
    s = sum(mult for weight, mult in blocks if weight == HALF)
    t = sum(mult for weight, mult in blocks if weight == -HALF)
    r = n - s - t
    rotated = act_second(plane, dagger(V))
    b_star, d_star = plane_to_annihilator(rotated, tol)

    upper = np.sqrt(np.clip(0.5 + values, 0.0, None))
    lower = np.sqrt(np.clip(0.5 - values, 0.0, None))

    # u d* = (I/2 + δ̂)^{1/2}: columns of u^H are the normalized columns of d*
    columns = [None if j >= n - t else d_star[:, j] / upper[j] for j in range(n)]
    u = dagger(_complete_columns(columns, n))
    reduced_b = u @ b_star

    # rows of u b* are orthogonal with norms (1/2 - δ̂)^{1/2}; rotate them onto the axes
    rows = [None if j < s else np.conj(reduced_b[j] / lower[j]) for j in range(n)]
    Q = dagger(_complete_columns(rows, n))
    normalized = act_first(rotated, Q)
    w = dagger(Q)

    pattern = np.hstack([np.diag(lower), np.diag(upper)]).astype(complex)
    rho_star = np.hstack([reduced_b @ w, u @ d_star])
    off_pattern = frobenius(rho_star - pattern)
    # snapped eigenvalues move the pattern by up to cluster_tol
    if off_pattern > max(tol.residual_abs, cluster_tol):
        raise MomentMismatch(
            f'Normal form misses the block pattern by {off_pattern:.3e}',
            block_sizes=(s, r, t),
        )

    logger.debug(f'Normal form blocks (s, r, t) = {(s, r, t)}')
    return NormalFormResult(
        rho_star=rho_star,
        block_sizes=(s, r, t),
        M=np.diag(lower[s:s + r]).astype(complex),
        delta_hat=np.diag(values).astype(complex),
        transforms={'second_summand': V, 'rows': u, 'first_summand': w},
        stabilizer_blocks=[mult for _, mult in blocks],
        off_pattern_norm=off_pattern,
        plane=normalized,
    )


# ===== TRANSFER AND GENUS-0 INVERSE =====

def transfer_plane(g_tilde: Plane, delta_i, f_i, theta=0.0, tol: Optional[Tolerance] = None) -> Plane:
    """
    Plane of γ = γ̃ z^{-δ} f at z = e^{iθ} on the unit circle.

    There z^{-δ} is unitary for the renormalized form, so the transfer is the
    first-summand action of (z^{-δ} f)^{-1}; it keeps γγ* = γ̃γ̃* and (s, t).
    """
    tol = resolve_tolerance(tol)
    delta_i = hermitian_part(as_cmatrix(delta_i, 'delta'))
    f_i = as_cmatrix(f_i, 'f')
    if frobenius(dagger(f_i) @ f_i - np.eye(f_i.shape[0])) > tol.residual_abs:
        raise InvalidMatrix('Transfer needs a unitary f')
    rescale = expm_hermitian(-theta * delta_i / (2 * np.pi))
    return act_first(g_tilde, dagger(rescale @ f_i))


def genus0_two_point_normalize(gamma2, tol: Optional[Tolerance] = None):
    """
    Rescaled-convention δ = -(−I + γ₂*γ₂)(I + γ₂*γ₂)^{-1} and the positive
    γ₁ = ((I + δ)(I − δ)^{-1})^{1/2} with (−I + γ₁*γ₁)(I + γ₁*γ₁)^{-1} = δ.

    Returns (δ, γ₁, residual of the two-sided equality).
    """
    tol = resolve_tolerance(tol)
    gamma2 = as_cmatrix(gamma2, 'gamma2')
    n = gamma2.shape[0]
    if gamma2.shape != (n, n) or numeric_rank(gamma2, tol) < n:
        raise BoundaryDegenerate('γ₂ must be invertible')
    eye = np.eye(n)
    gram2 = dagger(gamma2) @ gamma2
    delta = hermitian_part(-(gram2 - eye) @ np.linalg.inv(eye + gram2))
    spectrum = np.linalg.eigvalsh(delta)
    if np.any(np.abs(np.abs(spectrum) - 1.0) <= tol.residual_abs):
        raise BoundaryDegenerate('δ has an eigenvalue at ±1')
    gamma1 = hermitian_sqrt(hermitian_part((eye + delta) @ np.linalg.inv(eye - delta)))
    gram1 = dagger(gamma1) @ gamma1
    left = (gram1 - eye) @ np.linalg.inv(eye + gram1)
    residual = frobenius(left - delta)
    return delta, gamma1, residual


# ===== GM POINTS =====

def level_moment_plane(b_star, d_star) -> Plane:
    """
    The plane (d ; b) spanned by the annihilator rows with summands swapped.

    Its Hermitian left moment is (1/2)(I − 2bb*), the δ of a level point.
    """
    b_star, d_star = as_cmatrix(b_star, 'b_star'), as_cmatrix(d_star, 'd_star')
    n = b_star.shape[1]
    return Plane(m=d_star.shape[1], n=n, basis=np.vstack([dagger(d_star), dagger(b_star)]))


def parabolic_point(plane: Plane, delta, cluster_tol=None, tol: Optional[Tolerance] = None) -> PointParabolic:
    """Flag induced along the eigenbasis of δ (decreasing) with the eigenvalues as weights."""
    values, V, _ = weights_from_moment(delta, cluster_tol, tol)
    weights = [HALF] + [exact_weight(v) for v in values] + [-HALF]
    return PointParabolic(n=plane.n, flag=induced_flag(plane, V, tol), weights=weights)


def parabolic_from_gm(pt: GMPoint, tol: Optional[Tolerance] = None) -> ParabolicData:
    return correspondence_report(pt, tol)['parabolic']


def correspondence_report(pt: GMPoint, tol: Optional[Tolerance] = None) -> dict:
    """Parabolic data, normalized planes and parabolic degree read off a GM point."""
    tol = resolve_tolerance(tol)
    points, normal_forms, planes = [], [], []
    for b_star, d_star, delta in zip(pt.b_star, pt.d_star, pt.delta):
        if delta is None:
            raise InvalidMatrix('GM point has an unsolved δ')
        plane = level_moment_plane(b_star, d_star)
        planes.append(plane)
        normal_forms.append(normal_form(plane, delta, tol))
        points.append(parabolic_point(plane, delta, tol=tol))
    parabolic = ParabolicData(points=points)
    report = {
        'parabolic': parabolic,
        'planes': planes,
        'normal_forms': normal_forms,
        'pardeg': pardeg(pt.delta0, parabolic),
    }
    logger.info(f'Correspondence for ℓ={pt.ell}: pardeg = {report["pardeg"]}')
    return report
