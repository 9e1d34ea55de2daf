from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Tuple

import numpy as np

from moduli.exceptions import InvalidFrame, InvalidMatrix
from moduli.models.plane import Plane
from moduli.services.linalg_core import (
    as_cmatrix, dagger, frobenius, null_space, numeric_rank, resolve_tolerance,
)


@dataclass(frozen=True, eq=False)
class FramedEncoding:
    """
    The (α, β) datum of a framed bundle twisted by O(k).

    ``ev[i]`` is the evaluation V = C^p → E_{p_i} (an n x p matrix) and
    ``beta[i]`` an n-plane in V* ⊕ C^n whose V*-components vanish on
    ker ev[i]. Functionals pair with vectors bilinearly.
    """

    p: int
    n: int
    ev: Tuple[np.ndarray, ...]
    beta: Tuple[Plane, ...]
    delta0: int
    genus: int = 0
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'ev', tuple(as_cmatrix(e, 'ev') for e in self.ev))
        object.__setattr__(self, 'beta', tuple(self.beta))
        self.clean()

    @property
    def ell(self):
        return len(self.ev)

    def clean(self, tol=None):
        tol = resolve_tolerance(tol)
        if len(self.beta) != len(self.ev):
            raise InvalidMatrix('ev and beta must have one entry per marked point')
        for i, (ev, beta) in enumerate(zip(self.ev, self.beta)):
            if ev.shape != (self.n, self.p):
                raise InvalidMatrix(f'ev[{i}] has shape {ev.shape}, expected {(self.n, self.p)}')
            if numeric_rank(ev, tol) != self.n:
                raise InvalidMatrix(f'ev[{i}] is not surjective')
            if (beta.m, beta.n, beta.k) != (self.p, self.n, self.n):
                raise InvalidMatrix(f'beta[{i}] must be an n-plane in V* ⊕ C^n')
            kernel = null_space(ev, tol)
            if kernel.shape[1] and frobenius(beta.first_block.T @ kernel) > tol.residual_abs:
                raise InvalidFrame(f'beta[{i}] does not vanish on ker ev[{i}]')


@dataclass(frozen=True, eq=False)
class SubspaceWitness:
    """A p'-dimensional W ⊂ V with the rank and degree of the subsheaf it generates"""

    W: np.ndarray
    n_prime: int
    delta0_prime: int

    def __post_init__(self):
        W = as_cmatrix(self.W, 'W')
        self.clean(W)
        object.__setattr__(self, 'W', W)

    def clean(self, W):
        if W.shape[1] < 1 or self.n_prime < 1:
            raise InvalidMatrix(f'Witness needs p\' >= 1 and n\' >= 1, got {W.shape[1]} and {self.n_prime}')
        tol = resolve_tolerance(None)
        if frobenius(dagger(W) @ W - np.eye(W.shape[1])) > tol.residual_abs:
            raise InvalidFrame('Witness W must have orthonormal columns')

    @property
    def p_prime(self):
        return self.W.shape[1]


class EchelonInvariants(NamedTuple):
    s_prime: int
    t_prime: int
    r_prime: int
    m_prime: int


@dataclass(frozen=True)
class WeightReport:
    p: int
    p_prime: int
    n: int
    n_prime: int
    eta: Fraction
    w_alpha: int
    w_beta: List[int]
    w_W: Fraction
    w_W_k: Fraction
    w_W_inf: Fraction
    w_W_A: Fraction
    invariants: List[EchelonInvariants] = field(default_factory=list)
    t: List[int] = field(default_factory=list)
