"""
Dense complex linear algebra primitives with an explicit tolerance policy.

All dimension-valued answers (ranks, intersection dimensions, kernels) are
decided by a relative singular-value cutoff; every residual check uses an
absolute Frobenius bound. Both live in ``Tolerance``.
"""
import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from moduli.exceptions import (
    BranchAmbiguous, InvalidMatrix, RankAmbiguous, SingularMatrix,
)

logger = logging.getLogger(__name__)

DEFAULT_MODULI_SETTINGS = {
    'RANK_TOL': 1e-8,
    'RESIDUAL_TOL': 1e-9,
    'EIGEN_CLUSTER_TOL': 1e-7,
    'PLUCKER_CAP': 1_000_000,
    'DEFAULT_SEED': 0,
    'IRREDUCIBILITY_WORDS': 64,
}

# A singular value this close (as a factor) to the cutoff makes a rank ambiguous
AMBIGUITY_FACTOR = 10.0


def moduli_setting(name):
    """Read one value of the MODULI settings dict, falling back to defaults."""
    configured = getattr(settings, 'MODULI', {}) if settings.configured else {}
    return configured.get(name, DEFAULT_MODULI_SETTINGS[name])


@dataclass(frozen=True)
class Tolerance:
    rank_rel: float = DEFAULT_MODULI_SETTINGS['RANK_TOL']
    residual_abs: float = DEFAULT_MODULI_SETTINGS['RESIDUAL_TOL']

    def __post_init__(self):
        if not (self.rank_rel > 0 and self.residual_abs > 0):
            raise ImproperlyConfigured('Tolerances must be strictly positive')
        if self.rank_rel > 1e-6:
            raise ImproperlyConfigured(
                f'Relative rank tolerance {self.rank_rel} exceeds 1e-6'
            )

    @classmethod
    def from_settings(cls, rank_rel=None, residual_abs=None):
        """Build the tolerance from settings.MODULI, with optional overrides."""
        return cls(
            rank_rel=float(rank_rel if rank_rel is not None else moduli_setting('RANK_TOL')),
            residual_abs=float(
                residual_abs if residual_abs is not None else moduli_setting('RESIDUAL_TOL')
            ),
        )

    def with_residual(self, residual_abs):
        return replace(self, residual_abs=residual_abs)


def resolve_tolerance(tol: Optional[Tolerance]) -> Tolerance:
    return tol if tol is not None else Tolerance.from_settings()


# ===== MATRIX VALIDATION =====

def as_cmatrix(M, name='matrix') -> np.ndarray:
    """Return a finite 2-d complex copy of M or raise InvalidMatrix."""
    try:
        arr = np.array(M, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrix(f'{name} is not numeric: {exc}')
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise InvalidMatrix(f'{name} must be 2-dimensional, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f'{name} has non-finite entries')
    return arr


def frobenius(M) -> float:
    return float(np.linalg.norm(M, 'fro')) if np.size(M) else 0.0


def dagger(M) -> np.ndarray:
    return np.conj(np.transpose(M))


def hermitian_part(M) -> np.ndarray:
    return (M + dagger(M)) / 2


def unitarity_defect(U) -> float:
    return frobenius(dagger(U) @ U - np.eye(U.shape[1]))


def is_unitary(U, tol: Optional[Tolerance] = None) -> bool:
    tol = resolve_tolerance(tol)
    return U.shape[0] == U.shape[1] and unitarity_defect(U) <= tol.residual_abs


def is_hermitian(H, tol: Optional[Tolerance] = None) -> bool:
    tol = resolve_tolerance(tol)
    return H.shape[0] == H.shape[1] and frobenius(H - dagger(H)) <= tol.residual_abs


def orthonormal_rows_defect(R) -> float:
    return frobenius(R @ dagger(R) - np.eye(R.shape[0]))


# ===== RANKS =====

def numeric_rank(M, tol: Optional[Tolerance] = None, strict=False, scale=None) -> int:
    """
    Number of singular values above rank_rel times the largest one.

    A product of factors is ranked with ``scale`` set to the product of their
    norms; the cutoff is then taken against the larger of the two, so a
    product that is pure roundoff has rank 0.

    With strict=True a singular value within a factor 10 of the cutoff
    raises RankAmbiguous instead of being silently classified.
    """
    tol = resolve_tolerance(tol)
    arr = as_cmatrix(M)
    if arr.size == 0:
        return 0
    sv = linalg.svdvals(arr)
    reference = max(sv[0], float(scale or 0.0))
    if reference == 0.0:
        return 0
    cutoff = tol.rank_rel * reference
    if strict:
        near = (sv > cutoff / AMBIGUITY_FACTOR) & (sv < cutoff * AMBIGUITY_FACTOR)
        if np.any(near):
            raise RankAmbiguous(
                f'Singular value {sv[near][0]:.3e} is within a factor '
                f'{AMBIGUITY_FACTOR:g} of the cutoff {cutoff:.3e}',
                singular_values=sv.tolist(),
            )
    return int(np.count_nonzero(sv > cutoff))


def column_space(M, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Orthonormal basis (columns) of the column span of M."""
    tol = resolve_tolerance(tol)
    arr = as_cmatrix(M)
    if arr.shape[1] == 0:
        return np.zeros((arr.shape[0], 0), dtype=complex)
    U, _, _ = linalg.svd(arr, full_matrices=False)
    return U[:, :numeric_rank(arr, tol)]


def null_space(M, tol: Optional[Tolerance] = None, scale=None) -> np.ndarray:
    """Orthonormal basis (columns) of the right kernel of M; ``scale`` as in numeric_rank."""
    tol = resolve_tolerance(tol)
    arr = as_cmatrix(M)
    cols = arr.shape[1]
    if arr.shape[0] == 0:
        return np.eye(cols, dtype=complex)
    _, _, Vh = linalg.svd(arr, full_matrices=True)
    rank = numeric_rank(arr, tol, scale=scale)
    return dagger(Vh[rank:])


def orthogonal_complement(basis, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Orthonormal basis of the Hermitian orthogonal complement of span(basis)."""
    arr = as_cmatrix(basis)
    if arr.shape[1] == 0:
        return np.eye(arr.shape[0], dtype=complex)
    return null_space(dagger(arr), tol)


def intersection_dim(A, B, tol: Optional[Tolerance] = None) -> int:
    """dim(span A ∩ span B) = rank A + rank B - rank [A B]."""
    tol = resolve_tolerance(tol)
    A, B = as_cmatrix(A), as_cmatrix(B)
    if A.shape[1] == 0 or B.shape[1] == 0:
        return 0
    return (numeric_rank(A, tol) + numeric_rank(B, tol)
            - numeric_rank(np.hstack([A, B]), tol))


def subspace_intersection(A, B, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Orthonormal basis of span A ∩ span B."""
    tol = resolve_tolerance(tol)
    A, B = column_space(A, tol), column_space(B, tol)
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    kernel = null_space(np.hstack([A, -B]), tol)
    return column_space(A @ kernel[:A.shape[1]], tol)


def principal_angles(A, B) -> np.ndarray:
    """Principal angles between two column spans, in radians."""
    A, B = as_cmatrix(A), as_cmatrix(B)
    if A.shape[1] == 0 and B.shape[1] == 0:
        return np.zeros(0)
    return linalg.subspace_angles(A, B)


def subspaces_equal(A, B, angle_tol=1e-9) -> bool:
    A, B = as_cmatrix(A), as_cmatrix(B)
    if A.shape[1] != B.shape[1]:
        return False
    angles = principal_angles(A, B)
    return bool(angles.size == 0 or np.max(angles) < angle_tol)


def rref(M, tol: Optional[Tolerance] = None) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form with partial pivoting.

    Returns the reduced matrix and the list of pivot columns; an entry counts
    as nonzero when it exceeds rank_rel times the largest entry of M.
    """
    tol = resolve_tolerance(tol)
    R = as_cmatrix(M).copy()
    rows, cols = R.shape
    scale = np.max(np.abs(R)) if R.size else 0.0
    threshold = tol.rank_rel * max(scale, 1.0)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        candidate = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[candidate, c]) <= threshold:
            R[r:, c] = 0
            continue
        R[[r, candidate]] = R[[candidate, r]]
        R[r] = R[r] / R[r, c]
        for other in range(rows):
            if other != r:
                R[other] = R[other] - R[other, c] * R[r]
        pivots.append(c)
        r += 1
    return R, pivots


# ===== MATRIX FUNCTIONS =====

def hermitian_sqrt(H) -> np.ndarray:
    """Positive square root of a Hermitian positive semidefinite matrix."""
    w, V = linalg.eigh(hermitian_part(as_cmatrix(H)))
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ dagger(V)


def hermitian_inv_sqrt(H) -> np.ndarray:
    w, V = linalg.eigh(hermitian_part(as_cmatrix(H)))
    if np.min(w) <= 0:
        raise SingularMatrix('Matrix is not positive definite')
    return (V / np.sqrt(w)) @ dagger(V)


def expm_hermitian(delta) -> np.ndarray:
    """exp(2π√−1 δ) for Hermitian δ, through its eigendecomposition."""
    w, V = linalg.eigh(hermitian_part(as_cmatrix(delta)))
    return (V * np.exp(2j * np.pi * w)) @ dagger(V)


def principal_log_unitary(U, tol: Optional[Tolerance] = None) -> np.ndarray:
    """
    Hermitian δ with U = exp(2π√−1 δ) and spectrum in (-1/2, 1/2).

    Raises BranchAmbiguous when U has an eigenvalue at -1 within
    residual_abs, InvalidMatrix when U is not unitary.
    """
    tol = resolve_tolerance(tol)
    U = as_cmatrix(U, 'U')
    if U.shape[0] != U.shape[1]:
        raise InvalidMatrix(f'U must be square, got shape {U.shape}')
    if U.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    defect = unitarity_defect(U)
    if defect > tol.residual_abs:
        raise InvalidMatrix(f'U is not unitary (defect {defect:.3e})')

    # complex Schur form of a normal matrix is diagonal
    T, Z = linalg.schur(U, output='complex')
    eigenvalues = np.diag(T)
    if np.any(np.abs(eigenvalues + 1.0) <= tol.residual_abs):
        raise BranchAmbiguous('U has an eigenvalue at -1; principal branch is undefined')
    phases = np.angle(eigenvalues) / (2 * np.pi)
    delta = (Z * phases) @ dagger(Z)
    return hermitian_part(delta)


def polar_positive_factor(M, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Positive Hermitian factor H = (M M*)^{1/2} of the left polar decomposition."""
    tol = resolve_tolerance(tol)
    M = as_cmatrix(M, 'M')
    if M.shape[0] != M.shape[1]:
        raise InvalidMatrix(f'M must be square, got shape {M.shape}')
    if M.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    if numeric_rank(M, tol) < M.shape[0]:
        raise SingularMatrix('Polar factor requested for a singular matrix')
    _, H = linalg.polar(M, side='left')
    return hermitian_part(H)


def nearest_unitary(M) -> np.ndarray:
    """Unitary factor of the polar decomposition; the closest unitary in Frobenius norm."""
    M = as_cmatrix(M, 'M')
    if M.size == 0:
        return M
    U, _ = linalg.polar(M)
    return U


# ===== RANDOM SAMPLING =====

def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(int(seed) % 2 ** 64)


def complex_gaussian(rng, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(n, rng) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian, phases of R moved into Q."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    Q, R = np.linalg.qr(complex_gaussian(rng, (n, n)))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_hermitian_with_spectrum(spectrum, rng) -> np.ndarray:
    U = haar_unitary(len(spectrum), rng)
    return hermitian_part((U * np.asarray(spectrum, dtype=float)) @ dagger(U))
