from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from moduli.exceptions import InvalidFrame, InvalidMatrix, UnsupportedModel
from moduli.models.plane import Plane
from moduli.services.linalg_core import as_cmatrix, dagger, frobenius, resolve_tolerance


@dataclass(frozen=True, eq=False)
class FramedBundleModel:
    """Discrete model of a Grassmannian framed bundle (E, g) with n-planes g_i ⊂ E_{p_i} ⊕ C^n"""

    genus: int
    n: int
    delta0: int
    g: Tuple[Plane, ...]
    split_type: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'g', tuple(self.g))
        if self.split_type is not None:
            object.__setattr__(self, 'split_type', tuple(int(a) for a in self.split_type))
        self.clean()

    def clean(self):
        for i, plane in enumerate(self.g):
            if (plane.m, plane.n, plane.k) != (self.n, self.n, self.n):
                raise InvalidMatrix(f'g[{i}] must be an n-plane in C^n ⊕ C^n')
        if self.split_type is not None:
            if self.genus != 0:
                raise UnsupportedModel('Splitting types are only modelled in genus 0')
            if len(self.split_type) != self.n:
                raise InvalidMatrix(f'Splitting type needs {self.n} entries')
            if list(self.split_type) != sorted(self.split_type, reverse=True):
                raise InvalidMatrix('Splitting type must be weakly decreasing')
            if sum(self.split_type) != self.delta0:
                raise InvalidMatrix(
                    f'Splitting type sums to {sum(self.split_type)}, degree is {self.delta0}'
                )

    @property
    def ell(self):
        return len(self.g)


@dataclass(frozen=True, eq=False)
class SubbundleWitness:
    """
    A candidate subbundle E' ⊂ E: its rank, degree and fibers.

    ``fibers[i]`` is an n x n' orthonormal basis of E'_{p_i}. For generalized
    parabolic bundles ``fibers_q`` carries the fibers at the paired points.
    """

    n_prime: int
    delta0_prime: int
    fibers: Tuple[np.ndarray, ...]
    fibers_q: Optional[Tuple[np.ndarray, ...]] = None
    label: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'fibers', tuple(self._checked(f) for f in self.fibers))
        if self.fibers_q is not None:
            object.__setattr__(self, 'fibers_q', tuple(self._checked(f) for f in self.fibers_q))

    def _checked(self, fiber):
        fiber = as_cmatrix(fiber, 'fiber')
        if fiber.shape[1] != self.n_prime:
            raise InvalidMatrix(f'Fiber has dimension {fiber.shape[1]}, expected {self.n_prime}')
        tol = resolve_tolerance(None)
        if frobenius(dagger(fiber) @ fiber - np.eye(self.n_prime)) > tol.residual_abs:
            raise InvalidFrame('Fiber bases must be orthonormal')
        return fiber

    def describe(self):
        return {
            'label': self.label,
            'n_prime': self.n_prime,
            'delta0_prime': self.delta0_prime,
        }
