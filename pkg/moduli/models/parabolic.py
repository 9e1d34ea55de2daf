from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from moduli.exceptions import InvalidParabolicFlag, InvalidWeights
from moduli.models.plane import Plane
from moduli.services.linalg_core import as_cmatrix, numeric_rank, resolve_tolerance

HALF = Fraction(1, 2)


@dataclass(frozen=True, eq=False)
class PointParabolic:
    """
    Flag 0 = F_{-1} ⊂ F_0 ⊂ ... ⊂ F_n ⊂ F_{n+1} = C^n at one marked point.

    ``flag[j + 1]`` is an orthonormal basis of F_j; ``weights[j]`` is the
    weight α_j attached to the jump F_j / F_{j-1}, for j = 0, ..., n + 1.
    """

    n: int
    flag: Tuple[np.ndarray, ...]
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'flag', tuple(as_cmatrix(F, 'flag') for F in self.flag))
        object.__setattr__(self, 'weights', tuple(Fraction(w) for w in self.weights))
        self.clean()

    def clean(self, tol=None):
        tol = resolve_tolerance(tol)
        n = self.n
        if len(self.flag) != n + 3:
            raise InvalidParabolicFlag(f'Flag needs {n + 3} subspaces, got {len(self.flag)}')
        if len(self.weights) != n + 2:
            raise InvalidWeights(f'Flag needs {n + 2} weights, got {len(self.weights)}')
        if self.dims[0] != 0 or self.dims[-1] != n:
            raise InvalidParabolicFlag('Flag must start at 0 and end at C^n')
        for j in range(1, len(self.flag)):
            lower, upper = self.flag[j - 1], self.flag[j]
            if lower.shape[1] and numeric_rank(np.hstack([lower, upper]), tol) != self.dims[j]:
                raise InvalidParabolicFlag(f'F_{j - 2} is not contained in F_{j - 1}')
        if self.weights[0] != HALF or self.weights[-1] != -HALF:
            raise InvalidWeights('Boundary weights must be exactly 1/2 and -1/2')
        if any(a < b for a, b in zip(self.weights, self.weights[1:])):
            raise InvalidWeights('Weights must be weakly decreasing')
        if any(abs(w) > HALF for w in self.weights):
            raise InvalidWeights('Weights must lie in [-1/2, 1/2]')

    @property
    def dims(self) -> List[int]:
        return [F.shape[1] for F in self.flag]

    @property
    def jumps(self) -> List[int]:
        """dim F_j / F_{j-1} for j = 0, ..., n + 1"""
        dims = self.dims
        return [dims[j] - dims[j - 1] for j in range(1, len(dims))]

    @property
    def s(self):
        return self.dims[1]

    @property
    def t(self):
        return self.n - self.dims[-2]

    def weight_multiset(self) -> List[Fraction]:
        """Weights repeated by jump dimension, weakly decreasing"""
        out = []
        for jump, weight in zip(self.jumps, self.weights):
            out.extend([weight] * jump)
        return out


@dataclass(frozen=True, eq=False)
class ParabolicData:
    points: Tuple[PointParabolic, ...]

    def __post_init__(self):
        object.__setattr__(self, 'points', tuple(self.points))

    @property
    def ell(self):
        return len(self.points)

    @property
    def n(self):
        return self.points[0].n if self.points else 0


@dataclass(frozen=True, eq=False)
class NormalFormResult:
    """Block normal form ρ* = (b̂*, d̂*) of a level plane, with the unitaries used"""

    rho_star: np.ndarray
    block_sizes: Tuple[int, int, int]
    M: np.ndarray
    delta_hat: np.ndarray
    transforms: Dict[str, np.ndarray]
    stabilizer_blocks: List[int] = field(default_factory=list)
    off_pattern_norm: float = 0.0
    plane: Optional[Plane] = None
