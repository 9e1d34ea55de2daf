from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from moduli.exceptions import InvalidMatrix
from moduli.models.plane import Plane

HALF = Fraction(1, 2)


@dataclass(frozen=True, eq=False)
class GPBPlane:
    """An n-plane g ⊂ E_p ⊕ E_q = C^n ⊕ C^n over a point pair"""

    plane: Plane

    def __post_init__(self):
        if (self.plane.m, self.plane.n, self.plane.k) != (self.plane.n, self.plane.n, self.plane.n):
            raise InvalidMatrix('A GPB plane must be an n-plane in C^n ⊕ C^n')

    @property
    def n(self):
        return self.plane.n


@dataclass(frozen=True, eq=False)
class GPBundle:
    """Generalized parabolic bundle; weights are fixed at 1/2 and -1/2"""

    genus: int
    n: int
    delta0: int
    planes: Tuple[GPBPlane, ...]

    WEIGHTS = (HALF, -HALF)

    def __post_init__(self):
        object.__setattr__(self, 'planes', tuple(self.planes))
        for plane in self.planes:
            if plane.n != self.n:
                raise InvalidMatrix(f'GPB plane rank {plane.n} does not match bundle rank {self.n}')

    @property
    def ell(self):
        return len(self.planes)


@dataclass(frozen=True)
class DestabilizingCertificate:
    """A one-parameter subgroup exhibiting instability, with its limit weights"""

    weights_V: List[int]
    weights_framing: List[int]
    limit_weights: List[Fraction]
    common_vector: np.ndarray = field(repr=False, default=None)

    @property
    def certifies_instability(self):
        return bool(self.limit_weights) and all(w < 0 for w in self.limit_weights)
