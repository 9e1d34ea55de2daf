"""
Hilbert-Mumford weight calculus for framed encodings.

Only the cone generators of the SL(V) weights are evaluated: for W ⊂ V of
dimension p', weight p' - p on the first p' vectors of an adapted basis and
p' on the rest. All weights and verdicts are exact (int / Fraction); the
only floating-point step is the rank computation behind the invariants.
"""
import itertools
import logging
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from moduli.exceptions import InfeasibleDegree, InvalidMatrix, ParameterSingular
from moduli.models import (
    EchelonInvariants, FramedEncoding, Plane, SubspaceWitness, Verdict, WeightReport,
)
from moduli.services.framed_bundle import degree_range
from moduli.services.grassmann import plucker_from_basis
from moduli.services.linalg_core import (
    Tolerance, as_cmatrix, column_space, null_space, numeric_rank,
    orthogonal_complement, resolve_tolerance, rref,
)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def eta(k, genus) -> Fraction:
    """Stability parameter 1 / (k - g + 1/2)."""
    return Fraction(2, 2 * (k - genus) + 1)


def alpha_weight(p, p_prime, n, n_prime) -> int:
    if not (0 <= p_prime <= p and 0 <= n_prime <= n):
        raise InvalidMatrix(f'Inconsistent dimensions p={p}, p\'={p_prime}, n={n}, n\'={n_prime}')
    return p * n_prime - p_prime * n


def beta_weight(p, p_prime, t_i, t_prime, r_prime) -> int:
    if t_prime > t_i:
        raise InvalidMatrix(f't\' = {t_prime} exceeds t = {t_i}')
    return p * t_prime - p_prime * t_i + r_prime * (p - p_prime)


# ===== ENCODINGS =====

def bilinear_annihilator(plane: Plane, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Basis of {x : x^T v = 0 for v in plane}, as columns."""
    return null_space(plane.basis.T, tol)


def encoding_from_fibers(ev: Sequence, planes: Sequence[Plane], delta0, genus=0, k=1,
                         tol: Optional[Tolerance] = None) -> FramedEncoding:
    """Pull each g_i ⊂ E_{p_i} ⊕ C^n back to β_i = (ev_i^T ⊕ I)(g_i^⊥) ⊂ V* ⊕ C^n."""
    tol = resolve_tolerance(tol)
    ev = [as_cmatrix(e, 'ev') for e in ev]
    n, p = ev[0].shape
    beta = []
    for e, g in zip(ev, planes):
        annihilator = bilinear_annihilator(g, tol)
        pulled = np.vstack([e.T @ annihilator[:g.m], annihilator[g.m:]])
        beta.append(Plane(m=p, n=n, basis=column_space(pulled, tol)))
    return FramedEncoding(p=p, n=n, ev=tuple(ev), beta=tuple(beta), delta0=delta0, genus=genus, k=k)


def functional_blocks(beta: Plane, tol: Optional[Tolerance] = None):
    """
    Rows of V*-components of β and of its pure part β ∩ (V* ⊕ 0).

    Returns (B_t, B_all): t x p and n x p matrices of functionals on V.
    """
    pure = null_space(beta.second_block, tol, scale=1.0)
    B_t = (beta.first_block @ pure).T
    B_all = beta.first_block.T
    return B_t, B_all


def adapted_basis(W, p, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Unitary Q = [W | W^⊥] of V = C^p."""
    W = as_cmatrix(W, 'W').reshape(p, -1)
    return np.hstack([W, orthogonal_complement(W, tol)]) if W.shape[1] else np.eye(p, dtype=complex)


def _product_rank(A, W, tol) -> int:
    return numeric_rank(A @ W, tol, strict=True, scale=np.linalg.norm(A, 2) * np.linalg.norm(W, 2))


def echelon_invariants(beta_i: Plane, W, ev_i, tol: Optional[Tolerance] = None) -> EchelonInvariants:
    """(s', t', r', m') of E_{W,p_i} = ev_i(W) by numeric ranks; ambiguous ranks raise."""
    tol = resolve_tolerance(tol)
    W = as_cmatrix(W, 'W')
    if W.shape[1] == 0:
        return EchelonInvariants(0, 0, 0, 0)
    B_t, B_all = functional_blocks(beta_i, tol)
    m_prime = _product_rank(as_cmatrix(ev_i), W, tol)
    t_prime = _product_rank(B_t, W, tol) if B_t.shape[0] else 0
    quotient = _product_rank(B_all, W, tol)
    return EchelonInvariants(
        s_prime=m_prime - quotient,
        t_prime=t_prime,
        r_prime=quotient - t_prime,
        m_prime=m_prime,
    )


def echelon_invariants_by_rref(beta_i: Plane, W, ev_i, tol: Optional[Tolerance] = None) -> EchelonInvariants:
    """
    The same invariants through the echelon construction.

    1. Reduce the pure functionals b_1..b_t in the basis adapted to W; the
       pivots c_1 < ... < c_t are read off.
    2. Clear the c_j entries of the remaining functionals, reduce them, and
       read off c_{t+1}, ...
    3. t' counts first-stage pivots inside W, r' second-stage ones.
    """
    tol = resolve_tolerance(tol)
    W = as_cmatrix(W, 'W')
    p = beta_i.m
    p_prime = W.shape[1]
    if p_prime == 0:
        return EchelonInvariants(0, 0, 0, 0)
    Q = adapted_basis(W, p, tol)
    B_t, B_all = functional_blocks(beta_i, tol)

    first_pivots = []
    reduced_t = np.zeros((0, p), dtype=complex)
    if B_t.shape[0]:
        reduced_t, first_pivots = rref(B_t @ Q, tol)
        reduced_t = reduced_t[:len(first_pivots)]

    rest = B_all @ Q
    for row, col in zip(reduced_t, first_pivots):
        rest = rest - np.outer(rest[:, col], row)
    _, second_pivots = rref(rest, tol)

    _, ev_pivots = rref(as_cmatrix(ev_i) @ Q, tol)
    m_prime = sum(1 for c in ev_pivots if c < p_prime)
    t_prime = sum(1 for c in first_pivots if c < p_prime)
    r_prime = sum(1 for c in second_pivots if c < p_prime)
    return EchelonInvariants(
        s_prime=m_prime - t_prime - r_prime,
        t_prime=t_prime,
        r_prime=r_prime,
        m_prime=m_prime,
    )


# ===== BRUTE-FORCE WEIGHTS =====

def generator_weights(p, p_prime) -> List[int]:
    return [p_prime - p] * p_prime + [p_prime] * (p - p_prime)


def _max_weight(coords, weights, tol: Tolerance) -> int:
    magnitude = np.abs(coords)
    nonzero = magnitude > tol.rank_rel * magnitude.max()
    return max(w for w, keep in zip(weights, nonzero) if keep)


def minors_weight(M, weights, tol: Optional[Tolerance] = None) -> int:
    """Largest total weight of the columns of a nonzero maximal minor of M."""
    tol = resolve_tolerance(tol)
    M = as_cmatrix(M)
    rows, cols = M.shape
    subsets = list(itertools.combinations(range(cols), rows))
    coords = np.array([np.linalg.det(M[:, list(J)]) for J in subsets])
    return _max_weight(coords, [sum(weights[j] for j in J) for J in subsets], tol)


def plucker_weight(vector, weights, tol: Optional[Tolerance] = None) -> int:
    """Largest total weight over the nonzero Plücker coordinates of ``vector``."""
    tol = resolve_tolerance(tol)
    return _max_weight(vector.coords, [sum(weights[j] for j in J) for J in vector.subsets], tol)


def brute_force_alpha_weight(ev_i, W, tol: Optional[Tolerance] = None) -> int:
    """-min weight over nonzero n x n minors of ev_i in the basis adapted to W."""
    tol = resolve_tolerance(tol)
    ev_i = as_cmatrix(ev_i, 'ev')
    p = ev_i.shape[1]
    W = as_cmatrix(W, 'W')
    Q = adapted_basis(W, p, tol)
    return minors_weight(ev_i @ Q, [-w for w in generator_weights(p, W.shape[1])], tol)


def brute_force_beta_weight(beta_i: Plane, W, tol: Optional[Tolerance] = None) -> int:
    """-min weight over nonzero Plücker coordinates of β_i; the C^n part has weight 0."""
    tol = resolve_tolerance(tol)
    p = beta_i.m
    W = as_cmatrix(W, 'W')
    Q = adapted_basis(W, p, tol)
    adapted = np.vstack([Q.T @ beta_i.first_block, beta_i.second_block])
    vector = plucker_from_basis(adapted, tol)
    vertex = generator_weights(p, W.shape[1]) + [0] * beta_i.n
    return plucker_weight(vector, [-w for w in vertex], tol)


# ===== WEIGHT REPORTS =====

def pure_dimension(beta_i: Plane, tol: Optional[Tolerance] = None) -> int:
    """t_i = dim β_i ∩ (V* ⊕ 0)."""
    B_t, _ = functional_blocks(beta_i, tol)
    return B_t.shape[0]


def k_expansion(n, n_prime, delta0, delta0_prime, genus, k, t, t_prime, r_prime):
    """
    (w_{W,k}, w_{W,∞}, w_{W,A}) from the discrete data, exactly.

    ``t``, ``t_prime`` and ``r_prime`` are per-point sequences.
    """
    if n_prime < 1 or k < 1:
        raise InvalidMatrix('Weights need n\' >= 1 and k >= 1')
    slope = Fraction(delta0, n)
    slope_prime = Fraction(delta0_prime, n_prime)
    sub = [Fraction(r + tp, n_prime) for r, tp in zip(r_prime, t_prime)]
    full = [Fraction(r + ti, n) for r, ti in zip(r_prime, t)]
    bracket = sum((a - b for a, b in zip(sub, full)), Fraction(0))
    w_inf = slope - slope_prime + bracket
    correction = sum(
        (slope * a - slope_prime * b + (1 - genus) * (a - b) for a, b in zip(sub, full)),
        Fraction(0),
    ) + (HALF - genus) * (slope - slope_prime)
    w_k = w_inf + correction / k
    w_A = (slope - slope_prime) * (-slope + sum(full, Fraction(0)) - HALF)
    return w_k, w_inf, w_A


def w_report(enc: FramedEncoding, wit: SubspaceWitness, tol: Optional[Tolerance] = None) -> WeightReport:
    tol = resolve_tolerance(tol)
    p, n = enc.p, enc.n
    p_prime = wit.p_prime
    invariants = [
        echelon_invariants(beta, wit.W, ev, tol) for beta, ev in zip(enc.beta, enc.ev)
    ]
    t = [pure_dimension(beta, tol) for beta in enc.beta]
    w_alpha = alpha_weight(p, p_prime, n, wit.n_prime)
    w_beta = [
        beta_weight(p, p_prime, t_i, inv.t_prime, inv.r_prime) for t_i, inv in zip(t, invariants)
    ]
    parameter = eta(enc.k, enc.genus)
    w_W = w_alpha + parameter * sum(w_beta)
    w_k, w_inf, w_A = k_expansion(
        n, wit.n_prime, enc.delta0, wit.delta0_prime, enc.genus, enc.k, t,
        [inv.t_prime for inv in invariants], [inv.r_prime for inv in invariants],
    )
    logger.debug(f'Weight report p\'={p_prime} n\'={wit.n_prime}: w_W={w_W}, w_inf={w_inf}')
    return WeightReport(
        p=p, p_prime=p_prime, n=n, n_prime=wit.n_prime, eta=parameter,
        w_alpha=w_alpha, w_beta=w_beta, w_W=Fraction(w_W),
        w_W_k=w_k, w_W_inf=w_inf, w_W_A=w_A,
        invariants=invariants, t=t,
    )


def compare_witnesses(report: WeightReport, enlarged: WeightReport) -> Fraction:
    """Predicted w_W - w_{W1} = (p'_1 - p')(n + η Σ(t_i + r'_i)) for W ⊂ W1 with equal subsheaf data."""
    total = sum(t_i + inv.r_prime for t_i, inv in zip(report.t, report.invariants))
    return (enlarged.p_prime - report.p_prime) * (report.n + report.eta * total)


def classify_k_stability(report: WeightReport) -> Verdict:
    return classify_limit(report.w_W_inf, report.w_W_A)


def classify_limit(w_inf, w_A) -> Verdict:
    """Sign of w_{W,k} for large k: w_∞ decides, w_A breaks a tie."""
    if w_inf > 0:
        return Verdict.STABLE
    if w_inf < 0:
        return Verdict.UNSTABLE
    if w_A > 0:
        return Verdict.STABLE
    if w_A == 0:
        return Verdict.STRICTLY_SEMISTABLE
    return Verdict.UNSTABLE


def verdict_from_sign(value) -> Verdict:
    if value > 0:
        return Verdict.STABLE
    if value == 0:
        return Verdict.STRICTLY_SEMISTABLE
    return Verdict.UNSTABLE


# ===== C* ACTION =====

def cstar_parameters(n, ell, delta0):
    """(γ, μ) = (2n/(ℓn - 2δ₀), γℓ - 2 - δ₀/n)."""
    denominator = ell * n - 2 * delta0
    if denominator == 0:
        raise ParameterSingular(f'ℓn = 2δ₀ = {2 * delta0}; γ is undefined')
    gamma = Fraction(2 * n, denominator)
    mu = gamma * ell - 2 - Fraction(delta0, n)
    return gamma, mu


def cstar_weights(n, ell, delta0, s, t, k=10 ** 4, genus=0):
    """
    Raw C* weight pair at twist k with η = γ/(k - g + μ) and p = δ₀ + (k - g + 1)n,
    together with the limit pair (ℓn/2 - δ₀ - Σs, ℓn/2 + δ₀ - Σt).
    """
    gamma, mu = cstar_parameters(n, ell, delta0)
    parameter = gamma / (k - genus + mu)
    p = delta0 + (k - genus + 1) * n
    lower = n * n + parameter * sum(n * (n - s_i) - p * s_i for s_i in s)
    upper = -n * n + parameter * sum(-n * t_i + p * (n - t_i) for t_i in t)
    half = Fraction(ell * n, 2)
    limit = (half - delta0 - sum(s), half + delta0 - sum(t))
    return {
        'gamma': gamma,
        'mu': mu,
        'eta': parameter,
        'raw': (lower, upper),
        'limit': limit,
    }


def cstar_classify(n, ell, delta0, s, t, k=10 ** 4, genus=0):
    """Verdict of the C* action from Σs (≤) ℓn/2 - δ₀ and Σt (≤) ℓn/2 + δ₀."""
    if len(s) != ell or len(t) != ell:
        raise InvalidMatrix('s and t need one entry per marked point')
    if abs(delta0) > degree_range(n, ell):
        if ell * n == 2 * delta0:
            raise ParameterSingular(f'ℓn = 2δ₀ = {2 * delta0}; γ is undefined')
        raise InfeasibleDegree(
            f'|δ₀| = {abs(delta0)} exceeds the admissible range {degree_range(n, ell)}'
        )
    weights = cstar_weights(n, ell, delta0, s, t, k=k, genus=genus)
    bounds = weights['limit']
    if all(b > 0 for b in bounds):
        verdict = Verdict.STABLE
    elif all(b >= 0 for b in bounds):
        verdict = Verdict.SEMISTABLE
    else:
        verdict = Verdict.UNSTABLE
    return verdict, weights
