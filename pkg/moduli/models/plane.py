from dataclasses import dataclass, field

import numpy as np

from moduli.exceptions import InvalidFrame, InvalidMatrix
from moduli.services.linalg_core import (
    as_cmatrix, dagger, frobenius, resolve_tolerance, subspaces_equal,
)


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Plane:
    """A k-plane in the split space C^m ⊕ C^n, held by an orthonormal basis"""

    m: int
    n: int
    basis: np.ndarray

    def __post_init__(self):
        basis = as_cmatrix(self.basis, 'basis')
        if basis.shape[0] != self.m + self.n:
            raise InvalidMatrix(
                f'Basis has {basis.shape[0]} rows, expected m + n = {self.m + self.n}'
            )
        self.clean(basis)
        object.__setattr__(self, 'basis', _frozen(basis))

    def clean(self, basis, tol=None):
        tol = resolve_tolerance(tol)
        defect = frobenius(dagger(basis) @ basis - np.eye(basis.shape[1]))
        if defect > tol.residual_abs:
            raise InvalidFrame(f'Plane basis is not orthonormal (defect {defect:.3e})')

    @property
    def k(self):
        return self.basis.shape[1]

    @property
    def dim_first(self):
        return self.m

    @property
    def dim_second(self):
        return self.n

    @property
    def first_block(self):
        """Components in the first summand C^m"""
        return self.basis[:self.m]

    @property
    def second_block(self):
        """Components in the second summand C^n"""
        return self.basis[self.m:]

    def same_as(self, other, angle_tol=1e-9):
        return (
            (self.m, self.n) == (other.m, other.n)
            and subspaces_equal(self.basis, other.basis, angle_tol)
        )

    def __repr__(self):
        return f'Plane(m={self.m}, n={self.n}, k={self.k})'


@dataclass(frozen=True, eq=False)
class PluckerVector:
    """Unit-norm Plücker coordinates, lexicographic subsets, first nonzero coordinate real positive"""

    k: int
    coords: np.ndarray
    ambient: int = 0
    subsets: tuple = field(default=(), repr=False)

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=complex).ravel()
        self.clean(coords)
        object.__setattr__(self, 'coords', _frozen(coords))

    def clean(self, coords):
        if not np.all(np.isfinite(coords)):
            raise InvalidMatrix('Plücker coordinates must be finite')
        if not np.any(np.abs(coords) > 0):
            raise InvalidMatrix('The zero vector is not a point of projective space')

    def projective_distance(self, other):
        """min over phases of |a·e^{iθ} - b| for the normalized vectors"""
        if self.coords.shape != other.coords.shape:
            return float('inf')
        a = self.coords / np.linalg.norm(self.coords)
        b = other.coords / np.linalg.norm(other.coords)
        overlap = np.vdot(a, b)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        return float(np.linalg.norm(a * phase - b))

    def projectively_equal(self, other, tol=1e-9):
        return self.projective_distance(other) < tol
