"""Fourier analysis of digit functions f: Z_d^k -> Z_d.

For each output digit j define Q(x) = +1 if f(x) = j else -1.  Q decomposes
over the characters

    chi_alpha(x) = exp(-2*pi*i*(x . alpha)/d),  alpha in Z_d^k,

with coefficients Q_hat(alpha) = mean_x Q(x) chi_alpha(x).  Two parameters
of f fall out of this decomposition:

* distributional complexity r(f): the least Hamming weight of a nonzero
  alpha with a nonvanishing coefficient for some output digit j.  Fixing
  fewer than r input coordinates cannot bias the output.
* linearity gap g(f): the least number of inputs that must be fixed to
  make the restriction a linear (affine) function modulo some divisor of d.

All brute-force paths enumerate Z_d^k and are budget-guarded; callers fall
back to the structured routines in hcpw.profile for large instances.

Functions are supplied as batch callables mapping an (N, k) int array of
inputs to an (N,) int array of output digits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

DEFAULT_BUDGET = 10**7
COEFF_TOL = 1e-9


class BudgetExceeded(Exception):
    """Enumeration would exceed the configured brute-force budget."""


def _require_budget(d: int, k: int, budget: int) -> int:
    size = d**k
    if size > budget:
        raise BudgetExceeded(f"d^k = {size} exceeds budget {budget}")
    return size


def enumerate_inputs(d: int, k: int) -> np.ndarray:
    """All of Z_d^k as a (d^k, k) array, lexicographic order."""
    grids = np.indices((d,) * k).reshape(k, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def chi(alpha, x, d: int) -> complex | np.ndarray:
    """Character value(s) exp(-2*pi*i*(x . alpha)/d)."""
    alpha = np.asarray(alpha, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    dot = x @ alpha if x.ndim > 1 else int(np.dot(x, alpha))
    return np.exp(-2j * np.pi * np.asarray(dot) / d)


def indicator_values(f_batch, d: int, k: int, j: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Q values (+1 where f = j, else -1) over all of Z_d^k."""
    _require_budget(d, k, budget)
    xs = enumerate_inputs(d, k)
    out = np.asarray(f_batch(xs), dtype=np.int64)
    return np.where(out == j, 1.0, -1.0)


def fourier_coeff_bruteforce(
    f_batch, d: int, k: int, alpha, j: int, budget: int = DEFAULT_BUDGET
) -> complex:
    """Q_hat(alpha) = (1/d^k) sum_x Q(x) chi_alpha(x), by direct enumeration."""
    size = _require_budget(d, k, budget)
    xs = enumerate_inputs(d, k)
    q = indicator_values(f_batch, d, k, j, budget)
    return complex(np.sum(q * chi(alpha, xs, d)) / size)


def coefficient_table(f_batch, d: int, k: int, j: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All coefficients Q_hat(alpha) at once, as a (d,)*k tensor.

    The multidimensional DFT computes sum_x Q(x) exp(-2*pi*i*(x.alpha)/d)
    entry by entry, which matches the brute-force definition after
    normalizing by d^k.
    """
    size = _require_budget(d, k, budget)
    q = indicator_values(f_batch, d, k, j, budget).reshape((d,) * k)
    return np.fft.fftn(q) / size


def hamming_weights(d: int, k: int) -> np.ndarray:
    """Hamming weight of every alpha in Z_d^k, shaped (d,)*k."""
    idx = np.indices((d,) * k)
    return np.count_nonzero(idx != 0, axis=0)


@dataclass
class ComplexityResult:
    value: int
    is_lower_bound: bool = False
    witness_alpha: tuple[int, ...] | None = None
    witness_j: int | None = None
    witness_coeff: complex | None = None


def distributional_r(
    f_batch,
    d: int,
    k: int,
    budget: int = DEFAULT_BUDGET,
    tol: float = COEFF_TOL,
    max_weight: int | None = None,
) -> ComplexityResult:
    """Least weight of a nonzero character surviving in some Q^(j).

    Scans weights in ascending order; if `max_weight` caps the scan before
    any coefficient survives, the result is flagged as the lower bound
    r > max_weight.
    """
    weights = hamming_weights(d, k)
    tables = [coefficient_table(f_batch, d, k, j, budget) for j in range(d)]
    top = k if max_weight is None else min(max_weight, k)
    for w in range(1, top + 1):
        mask = weights == w
        for j, table in enumerate(tables):
            hits = np.abs(table[mask]) > tol
            if hits.any():
                flat = np.flatnonzero(mask)
                alpha_flat = flat[np.argmax(hits)]
                alpha = tuple(int(v) for v in np.unravel_index(alpha_flat, (d,) * k))
                return ComplexityResult(
                    value=w,
                    witness_alpha=alpha,
                    witness_j=j,
                    witness_coeff=complex(table[alpha]),
                )
    return ComplexityResult(value=top, is_lower_bound=True)


def proper_divisors_above_one(d: int) -> list[int]:
    return [m for m in range(2, d + 1) if d % m == 0]


@dataclass
class LinearityWitness:
    fixed_positions: tuple[int, ...]
    fixed_values: tuple[int, ...]
    modulus: int
    constant: int
    coefficients: tuple[int, ...]
    verified_exhaustively: bool


@dataclass
class LinearityResult:
    value: int
    is_lower_bound: bool = False
    probable: bool = False  # some restriction accepted on sampled evidence only
    witness: LinearityWitness | None = None


def _fit_affine(f_batch, d: int, k: int, free: list[int], fixed: dict[int, int],
                dhat: int) -> tuple[int, list[int]]:
    """Fit constant and per-coordinate coefficients mod dhat from probes."""
    base = np.zeros((1, k), dtype=np.int64)
    for pos, val in fixed.items():
        base[0, pos] = val
    c0 = int(f_batch(base)[0]) % dhat
    coeffs = []
    for pos in free:
        probe = base.copy()
        probe[0, pos] = 1
        coeffs.append((int(f_batch(probe)[0]) - c0) % dhat)
    return c0, coeffs


def _verify_affine(
    f_batch, d: int, k: int, free: list[int], fixed: dict[int, int],
    dhat: int, c0: int, coeffs: list[int],
    exhaustive_budget: int, samples: int, rng: np.random.Generator,
) -> tuple[bool, bool]:
    """Return (is_affine, exhaustive).  A failed point disproves; a sampled
    pass is only probable."""
    n_free = len(free)
    coeff_arr = np.array(coeffs, dtype=np.int64)

    def check(rows: np.ndarray) -> bool:
        pts = np.zeros((len(rows), k), dtype=np.int64)
        for pos, val in fixed.items():
            pts[:, pos] = val
        pts[:, free] = rows
        expect = (c0 + rows @ coeff_arr) % dhat
        return bool(np.all(np.asarray(f_batch(pts)) % dhat == expect))

    # cheap sampled disproof first
    if n_free > 0 and samples > 0:
        rows = rng.integers(0, d, size=(min(samples, 256), n_free))
        if not check(rows):
            return False, False
    if d**n_free <= exhaustive_budget:
        rows = enumerate_inputs(d, n_free) if n_free else np.zeros((1, 0), dtype=np.int64)
        return check(rows), True
    rows = rng.integers(0, d, size=(samples, n_free))
    return check(rows), False


def linearity_g(
    f_batch,
    d: int,
    k: int,
    budget: int = DEFAULT_BUDGET,
    dhat_all_divisors: bool = True,
    samples: int = 10_000,
    seed: int = 0,
    max_fixed: int | None = None,
) -> LinearityResult:
    """Least number of fixed inputs making the restriction affine mod dhat.

    Searches subsets in ascending size and fixings lexicographically.  The
    affine fit uses the all-zero probe and unit-direction probes; every
    claimed-linear restriction is re-verified on all remaining inputs when
    that is within budget, otherwise on `samples` random inputs (flagged
    `probable`).
    """
    rng = np.random.default_rng(seed)
    moduli = proper_divisors_above_one(d) if dhat_all_divisors else [d]
    top = k if max_fixed is None else min(max_fixed, k)
    for ell in range(0, top + 1):
        for subset in itertools.combinations(range(k), ell):
            free = [p for p in range(k) if p not in subset]
            for fixing in itertools.product(range(d), repeat=ell):
                fixed = dict(zip(subset, fixing))
                for dhat in moduli:
                    c0, coeffs = _fit_affine(f_batch, d, k, free, fixed, dhat)
                    ok, exhaustive = _verify_affine(
                        f_batch, d, k, free, fixed, dhat, c0, coeffs,
                        exhaustive_budget=budget, samples=samples, rng=rng,
                    )
                    if ok:
                        return LinearityResult(
                            value=ell,
                            probable=not exhaustive,
                            witness=LinearityWitness(
                                fixed_positions=subset,
                                fixed_values=fixing,
                                modulus=dhat,
                                constant=c0,
                                coefficients=tuple(coeffs),
                                verified_exhaustively=exhaustive,
                            ),
                        )
    return LinearityResult(value=top, is_lower_bound=True)


def parseval_defect(f_batch, d: int, k: int, j: int, budget: int = DEFAULT_BUDGET) -> float:
    """|sum_alpha |Q_hat|^2 - 1|; zero because Q takes values in {+1,-1}."""
    table = coefficient_table(f_batch, d, k, j, budget)
    return float(abs(np.sum(np.abs(table) ** 2) - 1.0))


def fourier_coeff_is_zero_exact(f_batch, d: int, k: int, alpha, j: int,
                                budget: int = DEFAULT_BUDGET) -> bool:
    """Exact zero test for Q_hat(alpha) via cyclotomic reduction.

    The coefficient is an integer combination sum_t m_t w^t of d-th roots
    of unity; it vanishes iff the polynomial sum m_t z^t reduces to zero
    modulo the d-th cyclotomic polynomial.
    """
    import sympy

    _require_budget(d, k, budget)
    xs = enumerate_inputs(d, k)
    q = np.asarray(f_batch(xs), dtype=np.int64)
    qpm = np.where(q == j, 1, -1)
    phases = (xs @ np.asarray(alpha, dtype=np.int64)) % d
    counts = np.zeros(d, dtype=np.int64)
    np.add.at(counts, phases, qpm)
    z = sympy.symbols("z")
    poly = sympy.Poly(sum(int(c) * z**t for t, c in enumerate(counts)), z)
    if poly.is_zero:
        return True
    cyclo = sympy.Poly(sympy.cyclotomic_poly(d, z), z)
    return sympy.rem(poly, cyclo, domain="QQ") == 0
