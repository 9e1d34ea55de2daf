"""
Grassmannian planes in a split space C^m ⊕ C^n.

The canonical representation of a plane is its orthonormal basis; graphs,
annihilator rows (b*, d*) and Plücker vectors are derived views. The two
moment maps return skew-Hermitian matrices; multiply by -√−1 to get the
Hermitian moment value.
"""
import itertools
import logging
from math import comb
from typing import Optional, Tuple

import numpy as np

from moduli.exceptions import InvalidFrame, InvalidMatrix, SingularMatrix, TooLarge
from moduli.models import Plane, PluckerVector
from moduli.services.linalg_core import (
    Tolerance, as_cmatrix, column_space, dagger, hermitian_inv_sqrt,
    hermitian_part, intersection_dim, moduli_setting, null_space, numeric_rank,
    orthogonal_complement, orthonormal_rows_defect, resolve_tolerance,
)

logger = logging.getLogger(__name__)

HALF_I = 0.5j


# ===== CONSTRUCTION AND CONVERSIONS =====

def plane_from_span(m, n, M, tol: Optional[Tolerance] = None) -> Plane:
    """Plane spanned by the columns of M (any spanning set)."""
    return Plane(m=m, n=n, basis=column_space(as_cmatrix(M), tol))


def coordinate_plane(m, n, which='first') -> Plane:
    """The first summand C^m x {0} or the second summand {0} x C^n."""
    if which == 'first':
        basis = np.vstack([np.eye(m), np.zeros((n, m))])
    elif which == 'second':
        basis = np.vstack([np.zeros((m, n)), np.eye(n)])
    else:
        raise ValueError(f'Unknown summand: {which}')
    return Plane(m=m, n=n, basis=basis)


def diagonal_plane(n) -> Plane:
    """The diagonal {(v, v)} in C^n ⊕ C^n."""
    return plane_from_graph(np.eye(n))


def plane_from_graph(gamma) -> Plane:
    """Graph of γ: C^m → C^n, with basis (I; γ)(I + γ*γ)^{-1/2}."""
    gamma = as_cmatrix(gamma, 'gamma')
    n, m = gamma.shape
    stacked = np.vstack([np.eye(m), gamma])
    basis = stacked @ hermitian_inv_sqrt(np.eye(m) + dagger(gamma) @ gamma)
    return Plane(m=m, n=n, basis=basis)


def plane_to_graph(g: Plane, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Recover γ with g = graph(γ); needs the first-summand block to be invertible (t = 0)."""
    tol = resolve_tolerance(tol)
    X, Y = g.first_block, g.second_block
    if g.k != g.m or numeric_rank(X, tol) < g.m:
        raise SingularMatrix('Plane is not a graph over the first summand')
    return Y @ np.linalg.inv(X)


def plane_from_annihilator(b_star, d_star, tol: Optional[Tolerance] = None) -> Plane:
    """Kernel of the orthonormal rows (b*, d*)."""
    tol = resolve_tolerance(tol)
    b_star = as_cmatrix(b_star, 'b_star')
    d_star = as_cmatrix(d_star, 'd_star')
    if b_star.shape[0] != d_star.shape[0]:
        raise InvalidMatrix('b* and d* must have the same number of rows')
    rows = np.hstack([b_star, d_star])
    defect = orthonormal_rows_defect(rows)
    if defect > tol.residual_abs:
        raise InvalidFrame(f'Rows of (b*, d*) are not orthonormal (defect {defect:.3e})')
    m, n = b_star.shape[1], d_star.shape[1]
    return Plane(m=m, n=n, basis=null_space(rows, tol))


def plane_to_annihilator(g: Plane, tol: Optional[Tolerance] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal annihilator rows (b*, d*) of g; b* is r x m and d* is r x n, r = m + n - k."""
    complement = orthogonal_complement(g.basis, tol)
    rows = dagger(complement)
    return rows[:, :g.m], rows[:, g.m:]


def act_first(g: Plane, u) -> Plane:
    """Action of a unitary u on the first summand."""
    u = as_cmatrix(u, 'u')
    return Plane(m=g.m, n=g.n, basis=np.vstack([u @ g.first_block, g.second_block]))


def act_second(g: Plane, u) -> Plane:
    """Action of a unitary u on the second summand."""
    u = as_cmatrix(u, 'u')
    return Plane(m=g.m, n=g.n, basis=np.vstack([g.first_block, u @ g.second_block]))


# ===== INVARIANTS =====

def intersection_dims(g: Plane, tol: Optional[Tolerance] = None) -> Tuple[int, int]:
    """(s, t) = (dim g ∩ first summand, dim g ∩ second summand)."""
    tol = resolve_tolerance(tol)
    first = coordinate_plane(g.m, g.n, 'first').basis
    second = coordinate_plane(g.m, g.n, 'second').basis
    s = intersection_dim(g.basis, first, tol) if g.m else 0
    t = intersection_dim(g.basis, second, tol) if g.n else 0
    return s, t


def _require_square_framing(g: Plane):
    if g.k != g.m:
        raise InvalidMatrix(f'Moment maps need a plane of dimension m = {g.m}, got k = {g.k}')


def moment_right(g: Plane, tol: Optional[Tolerance] = None) -> np.ndarray:
    """μ₁ = (√−1/2)(−I + 2bb*) on u(m), from the annihilator rows."""
    _require_square_framing(g)
    b_star, _ = plane_to_annihilator(g, tol)
    b = dagger(b_star)
    return HALF_I * hermitian_part(-np.eye(g.m) + 2 * b @ b_star)


def moment_left(g: Plane, tol: Optional[Tolerance] = None) -> np.ndarray:
    """μ₂ = (√−1/2)(−I + 2dd*) on u(n), from the annihilator rows."""
    _require_square_framing(g)
    _, d_star = plane_to_annihilator(g, tol)
    d = dagger(d_star)
    return HALF_I * hermitian_part(-np.eye(g.n) + 2 * d @ d_star)


def moment_right_graph(gamma) -> np.ndarray:
    """(√−1/2)(−I + γ*γ)(I + γ*γ)^{-1}"""
    gamma = as_cmatrix(gamma, 'gamma')
    m = gamma.shape[1]
    gg = dagger(gamma) @ gamma
    return HALF_I * hermitian_part((-np.eye(m) + gg) @ np.linalg.inv(np.eye(m) + gg))


def moment_left_graph(gamma) -> np.ndarray:
    """(√−1/2)(I − γγ*)(I + γγ*)^{-1}"""
    gamma = as_cmatrix(gamma, 'gamma')
    n = gamma.shape[0]
    gg = gamma @ dagger(gamma)
    return HALF_I * hermitian_part((np.eye(n) - gg) @ np.linalg.inv(np.eye(n) + gg))


def hermitian_moment(mu) -> np.ndarray:
    """Hermitian value -√−1·μ of a skew-Hermitian moment."""
    return hermitian_part(-1j * np.asarray(mu))


# ===== PLÜCKER COORDINATES =====

def plucker(g: Plane, tol: Optional[Tolerance] = None, cap=None) -> PluckerVector:
    """k x k minors of the basis over lexicographic row subsets, in canonical gauge."""
    return plucker_from_basis(g.basis, tol=tol, cap=cap)


def plucker_from_basis(basis, tol: Optional[Tolerance] = None, cap=None) -> PluckerVector:
    tol = resolve_tolerance(tol)
    basis = as_cmatrix(basis, 'basis')
    ambient, k = basis.shape
    cap = cap if cap is not None else moduli_setting('PLUCKER_CAP')
    count = comb(ambient, k)
    if count > cap:
        raise TooLarge(f'choose({ambient}, {k}) = {count} exceeds the cap {cap}')
    subsets = tuple(itertools.combinations(range(ambient), k))
    if k == 0:
        coords = np.ones(1, dtype=complex)
    else:
        index = np.array(subsets, dtype=int)
        coords = np.linalg.det(basis[index])
    return PluckerVector(k=k, coords=canonical_gauge(coords, tol), ambient=ambient, subsets=subsets)


def canonical_gauge(coords, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Unit norm with the first nonzero coordinate real positive; zero stays zero."""
    tol = resolve_tolerance(tol)
    coords = np.asarray(coords, dtype=complex)
    norm = np.linalg.norm(coords)
    if norm == 0.0:
        return coords
    coords = coords / norm
    nonzero = np.flatnonzero(np.abs(coords) > tol.rank_rel)
    if nonzero.size:
        lead = coords[nonzero[0]]
        coords = coords * (abs(lead) / lead)
    return coords
