"""Sparse linear constraints and linear solving over Z_d for composite d.

Z_d is not a field for composite d, so systems are solved by the Chinese
remainder theorem: reduce modulo each prime-power factor, eliminate there
(prime fields directly; prime powers by valuation-aware elimination with
saturation rows), then recombine.  Results distinguish a unique solution,
a solution family (reported with the canonical free-variables-at-zero
representative and the count of free base-p digits per factor), and an
inconsistent system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LinearConstraint:
    """sum(coeff * sigma[index]) == constant (mod d)."""

    terms: tuple[tuple[int, int], ...]
    constant: int

    def __post_init__(self) -> None:
        idx = [i for i, _ in self.terms]
        if not idx:
            raise ValueError("constraint must carry at least one term")
        if len(set(idx)) != len(idx):
            raise ValueError("constraint indices must be distinct")


def factorize(d: int) -> list[tuple[int, int]]:
    """Prime-power factorization [(p, e), ...] of d >= 2."""
    out = []
    m = d
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1
    if m > 1:
        out.append((m, 1))
    return out


def constraints_matrix(constraints: list[LinearConstraint], n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.zeros((len(constraints), n), dtype=np.int64)
    b = np.zeros(len(constraints), dtype=np.int64)
    for r, c in enumerate(constraints):
        for idx, coeff in c.terms:
            if not 0 <= idx < n:
                raise ValueError(f"constraint index {idx} out of range")
            a[r, idx] = coeff % d
        b[r] = c.constant % d
    return a, b


@dataclass
class FactorSolution:
    prime: int
    exponent: int
    consistent: bool
    solution: np.ndarray | None  # canonical, free digits zero
    free_digits: int  # log_p of the solution count
    null_basis: np.ndarray | None = None  # (free, n) over GF(p), prime fields only


@dataclass
class SolveResult:
    status: str  # "unique" | "family" | "inconsistent"
    solution: np.ndarray | None
    free_digits: dict[str, int] = field(default_factory=dict)  # e.g. {"2": 1}

    @property
    def free_count(self) -> int:
        return sum(self.free_digits.values())

    @property
    def solution_count(self) -> int:
        if self.status == "inconsistent":
            return 0
        count = 1
        for key, digits in self.free_digits.items():
            count *= int(key) ** digits
        return count


def _solve_prime(a: np.ndarray, b: np.ndarray, p: int) -> FactorSolution:
    """Gaussian elimination over GF(p); canonical solution has free vars 0."""
    m, n = a.shape
    mat = np.concatenate([a % p, (b % p)[:, None]], axis=1)
    piv_rows: list[tuple[int, int]] = []
    row = 0
    for col in range(n):
        nz = np.nonzero(mat[row:, col])[0]
        if len(nz) == 0:
            continue
        sel = row + int(nz[0])
        mat[[row, sel]] = mat[[sel, row]]
        inv = pow(int(mat[row, col]), -1, p)
        mat[row] = (mat[row] * inv) % p
        others = np.nonzero(mat[:, col])[0]
        for r in others:
            if r != row:
                mat[r] = (mat[r] - mat[r, col] * mat[row]) % p
        piv_rows.append((row, col))
        row += 1
        if row == m:
            break
    tail = mat[row:]
    if tail.size and np.any((tail[:, :-1].sum(axis=1) == 0) & (tail[:, -1] != 0)):
        return FactorSolution(p, 1, False, None, 0)
    x = np.zeros(n, dtype=np.int64)
    for r, c in piv_rows:
        x[c] = mat[r, -1] % p  # free variables are zero in the canonical solution
    pivot_cols = [c for _, c in piv_rows]
    free_cols = [c for c in range(n) if c not in pivot_cols]
    basis = np.zeros((len(free_cols), n), dtype=np.int64)
    for i, fc in enumerate(free_cols):
        basis[i, fc] = 1
        for r, c in piv_rows:
            basis[i, c] = (-mat[r, fc]) % p
    return FactorSolution(p, 1, True, x, len(free_cols), null_basis=basis)


def _solve_prime_power(a: np.ndarray, b: np.ndarray, p: int, e: int) -> FactorSolution:
    """Elimination over Z_{p^e} with minimal-valuation pivots.

    Whenever a pivot has valuation v > 0, the row scaled by p^(e-v) is kept
    as an extra constraint on the remaining columns (it lies in the row
    span but is not generated by unit combinations), so that free columns
    are genuinely free and solutions can be counted exactly.
    """
    mod = p**e
    m, n = a.shape
    rows = [np.concatenate([a[r] % mod, [b[r] % mod]]) for r in range(m)]

    def valuation(x: int) -> int:
        if x % mod == 0:
            return e
        v = 0
        x = x % mod
        while x % p == 0:
            x //= p
            v += 1
        return v

    pivots: list[tuple[np.ndarray, int, int]] = []  # (row, col, valuation)
    pending = rows
    for col in range(n):
        best, best_v = None, e
        for r in pending:
            if r[col] % mod and not any(r[c] % mod for c in range(col)):
                v = valuation(int(r[col]))
                if v < best_v:
                    best, best_v = r, v
        if best is None or best_v >= e:
            continue
        unit = (int(best[col]) // p**best_v) % mod
        best = (best * pow(unit, -1, mod)) % mod
        remaining = []
        for r in pending:
            if r is not best and r[col] % mod:
                v = valuation(int(r[col]))
                mult = (int(r[col]) // p**best_v) % mod
                r = (r - mult * best) % mod
            if r is not best:
                remaining.append(r)
        pending = remaining
        pivots.append((best, col, best_v))
        if best_v > 0:
            aux = (best * p ** (e - best_v)) % mod
            aux[col] = 0
            if np.any(aux % mod):
                pending.append(aux)

    for r in pending:
        if not np.any(r[:-1] % mod) and r[-1] % mod:
            return FactorSolution(p, e, False, None, 0)

    # back-substitute, later pivots first, free columns at zero
    x = np.zeros(n, dtype=np.int64)
    free_digits = e * (n - len(pivots))
    for rowvec, col, v in sorted(pivots, key=lambda t: -t[1]):
        rhs = int(rowvec[-1]) - int(np.dot(rowvec[:-1], x)) + int(rowvec[col]) * int(x[col])
        rhs %= mod
        if rhs % p**v:
            return FactorSolution(p, e, False, None, 0)
        x[col] = (rhs // p**v * pow(int(rowvec[col]) // p**v, -1, p ** (e - v))) % p ** (e - v)
        free_digits += v
    return FactorSolution(p, e, True, x, free_digits)


def linear_solve_mod(constraints: list[LinearConstraint], n: int, d: int) -> SolveResult:
    """Solve the constraint system over Z_d via CRT across prime-power factors."""
    a, b = constraints_matrix(constraints, n, d)
    return solve_matrix_mod(a, b, d)


def solve_matrix_mod(a: np.ndarray, b: np.ndarray, d: int) -> SolveResult:
    n = a.shape[1]
    factors = factorize(d)
    parts: list[FactorSolution] = []
    for p, e in factors:
        sol = _solve_prime(a, b, p) if e == 1 else _solve_prime_power(a, b, p, e)
        if not sol.consistent:
            return SolveResult(status="inconsistent", solution=None)
        parts.append(sol)

    x = np.zeros(n, dtype=np.int64)
    for part in parts:
        mod = part.prime**part.exponent
        rest = d // mod
        # CRT basis element: 1 mod `mod`, 0 mod the complement
        basis = rest * pow(rest, -1, mod)
        x = (x + basis * part.solution) % d
    free = {str(part.prime): part.free_digits for part in parts if part.free_digits}
    status = "family" if free else "unique"
    result = SolveResult(status=status, solution=x, free_digits=free)
    result._parts = parts  # kept for family enumeration
    result._d = d
    return result


def enumerate_family(result: SolveResult, cap: int = 1024) -> list[np.ndarray]:
    """All solutions of a solved system, canonical first, up to `cap`.

    Solutions enumerate lexicographically over the free coefficients of
    each prime factor.  Prime-power factors with freedom are not expanded
    (only the canonical representative appears); the attacks that rely on
    enumeration operate over square-free moduli.
    """
    if result.status == "inconsistent":
        return []
    parts = getattr(result, "_parts", None)
    if parts is None or result.status == "unique" or result.solution_count > cap:
        return [result.solution]
    d = result._d
    n = len(result.solution)

    per_factor: list[tuple[int, list[np.ndarray]]] = []
    for part in parts:
        mod = part.prime**part.exponent
        if part.exponent > 1 and part.free_digits:
            per_factor.append((mod, [part.solution]))
            continue
        options = [part.solution]
        if part.null_basis is not None and len(part.null_basis):
            p = part.prime
            coeff_grid = np.indices((p,) * len(part.null_basis)).reshape(
                len(part.null_basis), -1).T
            options = [
                (part.solution + coeffs @ part.null_basis) % p
                for coeffs in coeff_grid
            ]
        per_factor.append((mod, options))

    combos: list[np.ndarray] = [np.zeros(n, dtype=np.int64)]
    for mod, options in per_factor:
        rest = d // mod
        basis = rest * pow(rest, -1, mod)
        combos = [
            (partial + basis * opt) % d
            for partial in combos
            for opt in options
        ]
        if len(combos) > cap:
            return combos[:cap]
    return combos
