from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from moduli.exceptions import InvalidFrame, InvalidMatrix
from moduli.services.linalg_core import (
    as_cmatrix, frobenius, hermitian_part, orthonormal_rows_defect, resolve_tolerance,
    unitarity_defect,
)


@dataclass(frozen=True, eq=False)
class EMPoint:
    """
    A point (A_j, B_j, C_i, δ_i) of the extended moduli space.

    The skew-Hermitian √−1·δ_i is stored as the Hermitian δ_i. C[0] is the
    identity; an unset δ_1 is stored as None until solved.
    """

    n: int
    genus: int
    A: Tuple[np.ndarray, ...]
    B: Tuple[np.ndarray, ...]
    C: Tuple[np.ndarray, ...]
    delta: Tuple[Optional[np.ndarray], ...]

    def __post_init__(self):
        for name in ('A', 'B', 'C'):
            object.__setattr__(self, name, tuple(as_cmatrix(M, name) for M in getattr(self, name)))
        object.__setattr__(
            self, 'delta',
            tuple(None if d is None else hermitian_part(as_cmatrix(d, 'delta')) for d in self.delta),
        )
        self.clean()

    def clean(self, tol=None):
        tol = resolve_tolerance(tol)
        if len(self.A) != self.genus or len(self.B) != self.genus:
            raise InvalidMatrix(f'Genus {self.genus} needs {self.genus} pairs (A_j, B_j)')
        if len(self.C) != len(self.delta):
            raise InvalidMatrix('C and delta must have one entry per marked point')
        for M in self.A + self.B + self.C:
            if M.shape != (self.n, self.n):
                raise InvalidMatrix(f'Holonomy has shape {M.shape}, expected {(self.n, self.n)}')
            defect = unitarity_defect(M)
            if defect > tol.residual_abs:
                raise InvalidMatrix(f'Holonomy is not unitary (defect {defect:.3e})')
        if self.C and frobenius(self.C[0] - np.eye(self.n)) > tol.residual_abs:
            raise InvalidMatrix('C_1 must be the identity')
        for d in self.delta:
            if d is None:
                continue
            if d.shape != (self.n, self.n):
                raise InvalidMatrix(f'delta has shape {d.shape}, expected {(self.n, self.n)}')
            spectrum = np.linalg.eigvalsh(d)
            if spectrum.size and (spectrum[0] < -0.5 - tol.residual_abs or spectrum[-1] > 0.5 + tol.residual_abs):
                raise InvalidMatrix('delta eigenvalues must lie in [-1/2, 1/2]')

    @property
    def ell(self):
        return len(self.C)

    def with_delta(self, index, value):
        delta = list(self.delta)
        delta[index] = value
        return replace(self, delta=tuple(delta))


@dataclass(frozen=True, eq=False)
class GMPoint:
    """An EM point augmented with Grassmann planes given by annihilator rows (b_i*, d_i*)"""

    em: EMPoint
    b_star: Tuple[np.ndarray, ...]
    d_star: Tuple[np.ndarray, ...]
    delta0: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'b_star', tuple(as_cmatrix(b, 'b_star') for b in self.b_star))
        object.__setattr__(self, 'd_star', tuple(as_cmatrix(d, 'd_star') for d in self.d_star))
        self.clean()

    def clean(self, tol=None):
        tol = resolve_tolerance(tol)
        if not (len(self.b_star) == len(self.d_star) == self.em.ell):
            raise InvalidMatrix('GM point needs one plane per marked point')
        for b, d in zip(self.b_star, self.d_star):
            if b.shape != (self.n, self.n) or d.shape != (self.n, self.n):
                raise InvalidMatrix('Annihilator blocks must be n x n')
            defect = orthonormal_rows_defect(np.hstack([b, d]))
            if defect > tol.residual_abs:
                raise InvalidFrame(f'Rows of (b*, d*) are not orthonormal (defect {defect:.3e})')

    @property
    def n(self):
        return self.em.n

    @property
    def genus(self):
        return self.em.genus

    @property
    def ell(self):
        return self.em.ell

    @property
    def delta(self):
        return self.em.delta
