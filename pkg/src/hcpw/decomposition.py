"""Weight-level decomposition of the planted-distribution gap.

For a query table h over clauses and a planted mapping, the gap between
h's mean under the response-conditioned clause measure and under uniform
clauses decomposes over character weight levels:

    gap(sigma, h) = sum_{l=1..k} b_l(sigma) / |X_l|,

where b_l collects, over every character alpha of weight l, the character's
coefficient times the projection of (mean-centered) h onto alpha's support:

    b_l(sigma) = sum_{H(alpha)=l} c_alpha *
                 sum_{C_l in X_l} chi_alpha(sigma(C_l)) * h_S(C_l),

with h_S(C_l) the average of centered h over clauses restricted to
alpha's support S, and c_alpha the coefficients in
Q(x) = sum_alpha c_alpha chi_alpha(x).  Centering h removes the
constant-character term on both sides; the identity is then exact, and
b_l vanishes identically for l below the distributional complexity.

Feasible only for tiny instances (d^k and |X_k| both small); the point is
numeric verification, not scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from hcpw.fourier import BudgetExceeded, enumerate_inputs

X_BUDGET = 10**5
DK_BUDGET = 10**5


def ordered_tuples(n: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(n), k))


def count_ordered_tuples(n: int, k: int) -> int:
    return math.perm(n, k)


@dataclass
class DecompositionCheck:
    direct: complex
    decomposed: complex
    level_terms: dict[int, complex]  # b_l(sigma) / |X_l| per weight level

    @property
    def residual(self) -> float:
        return abs(self.direct - self.decomposed)


def decomposition_check(
    f_batch,
    d: int,
    k: int,
    n: int,
    sigma: np.ndarray,
    h: np.ndarray,
    j: int,
    dk_budget: int = DK_BUDGET,
    x_budget: int = X_BUDGET,
) -> DecompositionCheck:
    """Compute the gap directly and through the weight-level sum.

    `h` is indexed by the lexicographic order of ordered k-tuples over [n].
    Returns both values; the residual is |direct - decomposed| and should
    sit at floating-point noise.
    """
    if d**k > dk_budget:
        raise BudgetExceeded(f"d^k = {d**k} exceeds {dk_budget}")
    if count_ordered_tuples(n, k) > x_budget:
        raise BudgetExceeded(f"|X_k| = {count_ordered_tuples(n, k)} exceeds {x_budget}")

    sigma = np.asarray(sigma, dtype=np.int64)
    clauses = np.array(ordered_tuples(n, k), dtype=np.int64)
    h = np.asarray(h, dtype=float)
    if h.shape != (len(clauses),):
        raise ValueError(f"h must have one entry per ordered tuple ({len(clauses)})")
    h_centered = h - h.mean()

    out = np.asarray(f_batch(sigma[clauses]), dtype=np.int64)
    q_on_clauses = np.where(out == j, 1.0, -1.0)
    direct = complex(np.dot(h_centered, q_on_clauses) / len(clauses))

    # coefficients c_alpha with Q(x) = sum_alpha c_alpha chi_alpha(x)
    xs = enumerate_inputs(d, k)
    q_all = np.where(np.asarray(f_batch(xs), dtype=np.int64) == j, 1.0, -1.0)
    coeffs = np.fft.ifftn(q_all.reshape((d,) * k))

    level_terms: dict[int, complex] = {ell: 0j for ell in range(1, k + 1)}
    proj_cache: dict[tuple[int, ...], dict[tuple[int, ...], float]] = {}

    for alpha in itertools.product(range(d), repeat=k):
        support = tuple(i for i, a in enumerate(alpha) if a != 0)
        if not support:
            continue
        ell = len(support)
        c_alpha = coeffs[alpha]
        if abs(c_alpha) < 1e-15:
            continue
        if support not in proj_cache:
            sums: dict[tuple[int, ...], float] = {}
            for row, hv in zip(clauses[:, support], h_centered):
                key = tuple(row)
                sums[key] = sums.get(key, 0.0) + hv
            count = len(clauses) // count_ordered_tuples(n, ell)
            proj_cache[support] = {key: v / count for key, v in sums.items()}
        proj = proj_cache[support]
        abar = np.array([alpha[i] for i in support], dtype=np.int64)
        term = 0j
        for tup, hval in proj.items():
            phase = np.exp(-2j * np.pi * int(sigma[list(tup)] @ abar) / d)
            term += phase * hval
        level_terms[ell] += c_alpha * term / count_ordered_tuples(n, ell)

    decomposed = complex(sum(level_terms.values()))
    return DecompositionCheck(direct=direct, decomposed=decomposed, level_terms=level_terms)
