"""Spectral recovery from response-conditioned clause statistics.

The response of a clause is correlated with the value sum of r = k2+1
specific positions: table slot 0 and the k2 tail variables.  Conditioned
on the clause's projected positions carrying values with sum s, the
response hits a fixed residue rho with probability (d-1)/d^2 + (1/d)[s = rho]
(the lookup lands on slot 0 with probability 1/d, in which case the
response equals the projected sum).  Splitting the projected positions
into a row half A (|A| = ceil(r/2)) and a column half B and weighting each
sample by a character of its response therefore produces a noisy rank-one
matrix whose row/column phases encode the position sums modulo each prime
factor of d:

    E[ sum_rho omega^(u*rho) count_rho(A,B) ] ∝ omega^(u*(s_A + s_B)),

with omega a d-th root of unity and u = d/p selecting the mod-p character.
Discrete power iteration with root-of-unity rounding (sign rounding when
p = 2) converges to the phase pattern; label differences between tuples
sharing all but one position then yield sigma modulo p by majority-vote
elimination, and the prime parts recombine by CRT.  Global phase,
conjugation, and additive offsets leave a small candidate set that the
final check against the instance pairs resolves.

Each statistical query draws one fresh clause/response sample and reveals
only the projected index tuples and the response residue class; all
consumption is audited through OracleStats.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from hcpw.instances import PlantedInstance
from hcpw.modlinear import factorize
from hcpw.oracles import ChallengeDistribution, SampleBudgetExceeded, StatOracle
from hcpw.params import SchemeParams
from hcpw.rng import make_rng
from hcpw.scheme import eval_values_batch

DEFAULT_BUDGET_MULTIPLIER = 500.0  # calibrated on n=30 instances


def projected_positions(params: SchemeParams) -> np.ndarray:
    """Clause positions whose value sum biases the response: slot 0 + tails."""
    return np.array([0] + list(params.tail_positions), dtype=np.int64)


def projected_sum_bias(
    params: SchemeParams,
    samples: int,
    seed_or_rng: int | np.random.Generator,
    mapping=None,
    slot: int = 0,
    residue: int = 0,
) -> dict:
    """Empirical Pr[value sum over (slot, tails) == residue | response (!=)= residue].

    With uniform input values the exact conditionals are
    1/d + (d-1)/d^2 (given the response equals the residue) and (d-1)/d^2
    (given it does not).  `mapping=None` draws values uniformly; supplying
    a planted mapping draws clauses against it instead.
    """
    rng = make_rng(seed_or_rng)
    d = params.d
    w = params.clause_width()
    if mapping is None:
        values = rng.integers(0, d, size=(samples, w))
    else:
        from hcpw.scheme import draw_clause_array

        clauses = draw_clause_array(params, samples, rng)
        values = mapping.digits[clauses]
    responses = eval_values_batch(params, values)
    proj = values[:, [slot] + list(params.tail_positions)].sum(axis=1) % d
    hit = responses == residue
    event = proj == residue
    p_given_hit = float(np.mean(event[hit])) if hit.any() else float("nan")
    p_given_miss = float(np.mean(event[~hit])) if (~hit).any() else float("nan")
    return {
        "p_event_given_match": p_given_hit,
        "p_event_given_mismatch": p_given_miss,
        "expected_match": 1 / d + (d - 1) / d**2,
        "expected_mismatch": (d - 1) / d**2,
        "samples": samples,
    }


def _tuple_rank(tuples: np.ndarray, n: int) -> np.ndarray:
    """Rank of ordered distinct tuples within lexicographic enumeration."""
    m, c = tuples.shape
    rank = np.zeros(m, dtype=np.int64)
    for pos in range(c):
        v = tuples[:, pos].astype(np.int64)
        smaller_used = np.zeros(m, dtype=np.int64)
        for prev in range(pos):
            smaller_used += tuples[:, prev] < v
        rank = rank * (n - pos) + (v - smaller_used)
    return rank


def _num_tuples(n: int, c: int) -> int:
    return math.perm(n, c)


def _quantize(vec: np.ndarray, p: int, omega: complex, rng: np.random.Generator) -> np.ndarray:
    buckets = np.round(-np.angle(vec) * p / (2 * np.pi)).astype(np.int64) % p
    out = omega**buckets
    dead = np.abs(vec) < 1e-12
    if dead.any():
        out[dead] = omega ** rng.integers(0, p, size=int(dead.sum()))
    return out


@dataclass
class SpectralReport:
    success: bool
    sigma: np.ndarray | None
    stats: dict = field(default_factory=dict)
    pairs_checked: int = 0
    elapsed: float = 0.0


def spectral_attack(
    instance: PlantedInstance,
    seed_or_rng: int | np.random.Generator = 0,
    delta: float = 0.0,
    sample_budget: int | None = None,
    budget_multiplier: float = DEFAULT_BUDGET_MULTIPLIER,
    iterations: int | None = None,
    p_param: float | None = None,
    oracle: StatOracle | None = None,
) -> SpectralReport:
    """Recover the planted mapping from statistical queries.

    delta in [0, 2] controls how the emitted residue class tracks the true
    response: 0 reports it faithfully, 1 replaces it by a uniform residue
    (no signal; the attack must fail), 2 always reports a shifted residue.

    The sample budget defaults to budget_multiplier * n^max(1, r/2) * log2(n)^2
    queries.  p_param, when given, sets the per-half-step sample count to
    ceil(10/p_param) instead of spreading the budget over the iterations.
    """
    t0 = time.time()
    params = instance.params
    d, n = params.d, params.n
    r = params.k2 + 1
    c1, c2 = (r + 1) // 2, r // 2
    rng = make_rng(seed_or_rng)

    if oracle is None and instance.mapping is None:
        return SpectralReport(
            success=False, sigma=None, elapsed=time.time() - t0,
            stats={"reason": "no sampling oracle: the hidden mapping is unavailable"},
        )
    if sample_budget is None:
        sample_budget = int(budget_multiplier * n ** max(1, r / 2) * math.log2(n) ** 2)
    if oracle is None:
        oracle = StatOracle(ChallengeDistribution(instance.mapping, rng.spawn(1)[0]),
                            budget=sample_budget)
    if iterations is None:
        iterations = max(6, math.ceil(math.log2(max(_num_tuples(n, c1), 2))))

    proj = projected_positions(params)
    pos_a, pos_b = proj[:c1], proj[c1:]
    na, nb = _num_tuples(n, c1), _num_tuples(n, c2)
    primes = [p for p, _ in factorize(d)]
    omega = {p: np.exp(-2j * np.pi / p) for p in primes}
    # residue-class weights per prime: omega_d^(u * rho), u = d // p
    rho_weights = {
        p: np.exp(-2j * np.pi * (d // p) * np.arange(d) / d) for p in primes
    }
    range_size = na * nb * d + 1

    if p_param is not None:
        step_samples = math.ceil(10.0 / p_param)
    else:
        step_samples = max(1, sample_budget // (2 * iterations))

    def h_batch(clauses: np.ndarray, responses: np.ndarray):
        """Projected row/column tuple ranks plus the emitted residue class."""
        emitted = responses.copy()
        if delta > 0:
            count = len(emitted)
            if delta <= 1:
                scramble = rng.random(count) < delta
                emitted[scramble] = rng.integers(0, d, size=int(scramble.sum()))
            else:
                shift = rng.random(count) < (delta - 1)
                uniform = ~shift
                emitted[shift] = (emitted[shift]
                                  + rng.integers(1, d, size=int(shift.sum()))) % d
                emitted[uniform] = rng.integers(0, d, size=int(uniform.sum()))
        a_rank = _tuple_rank(clauses[:, pos_a], n)
        b_rank = _tuple_rank(clauses[:, pos_b], n)
        return a_rank, b_rank, emitted

    x = {p: omega[p] ** rng.integers(0, p, size=nb) for p in primes}
    try:
        for _ in range(iterations):
            a_rank, b_rank, emitted = oracle.one_mstat_batch(h_batch, range_size, step_samples)
            y = {}
            for p in primes:
                acc = np.zeros(na, dtype=complex)
                np.add.at(acc, a_rank, rho_weights[p][emitted] * x[p][b_rank])
                acc -= acc.mean()
                y[p] = _quantize(acc, p, omega[p], rng)
            a_rank, b_rank, emitted = oracle.one_mstat_batch(h_batch, range_size, step_samples)
            for p in primes:
                acc = np.zeros(nb, dtype=complex)
                np.add.at(acc, b_rank, np.conj(rho_weights[p][emitted]) * y[p][a_rank])
                acc -= acc.mean()
                x[p] = _quantize(acc, p, omega[p], rng)
    except SampleBudgetExceeded:
        return SpectralReport(
            success=False, sigma=None, elapsed=time.time() - t0,
            stats={"reason": "sample budget exhausted",
                   "oracle": oracle.stats.__dict__.copy()},
        )

    # labels: column-tuple value sums modulo p, up to conjugation and offset
    labels = {
        p: (np.round(-np.angle(x[p]) * p / (2 * np.pi)).astype(np.int64) % p)
        for p in primes
    }
    diffs = {p: _difference_solve(labels[p], n, c2, p) for p in primes}

    candidates = _assemble_candidates(diffs, primes, d, n)
    check_limit = min(instance.m, 512)
    sel = slice(0, check_limit)
    for cand in candidates:
        guesses = eval_values_batch(params, cand[instance.clauses[sel]])
        if np.array_equal(guesses, instance.responses[sel]) and instance.consistent(cand):
            return SpectralReport(
                success=True, sigma=cand, elapsed=time.time() - t0,
                pairs_checked=instance.m,
                stats=_run_stats(iterations, step_samples, len(candidates), d, c1, oracle),
            )
    stats = _run_stats(iterations, step_samples, len(candidates), d, c1, oracle)
    stats["reason"] = "no candidate consistent with the pairs"
    return SpectralReport(
        success=False, sigma=None, elapsed=time.time() - t0,
        pairs_checked=check_limit, stats=stats,
    )


def _run_stats(iterations: int, step_samples: int, candidates: int, d: int,
               c1: int, oracle: StatOracle) -> dict:
    return {
        "iterations": iterations,
        "step_samples": step_samples,
        "candidates_tried": candidates,
        # residue classes per digit stream; the c1 multiplier means streams
        # with gcd(c1, d) > 1 share classes, so the remaining classes are
        # also consumed for full character isolation
        "digit_stream_residues": [(i * c1) % d for i in range(d)],
        "oracle": oracle.stats.__dict__.copy(),
    }


def _difference_solve(labels: np.ndarray, n: int, c: int, p: int) -> np.ndarray:
    """sigma[j] - sigma[0] mod p by majority vote over shared-context tuples.

    Tuples differing in exactly one position have label difference equal to
    the mapped-digit difference at that position; additive offsets cancel.
    Voting over every shared context tolerates a small fraction of wrong
    labels.
    """
    if c > 2:
        raise NotImplementedError("difference voting implemented for tuple size <= 2")
    votes = np.zeros((n, p), dtype=np.int64)
    if c == 1:
        deltas = (labels - labels[0]) % p
        votes[np.arange(n), deltas] += 1
    else:
        for slot in (0, 1):
            # vary position `slot` between j and 0, share the other entry
            j_col, t_col = np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij")
            keep = j_col != t_col
            j_v, t_v = j_col[keep], t_col[keep]
            if slot == 0:
                tup_j = np.stack([j_v, t_v], axis=1)
                tup_0 = np.stack([np.zeros_like(t_v), t_v], axis=1)
            else:
                tup_j = np.stack([t_v, j_v], axis=1)
                tup_0 = np.stack([t_v, np.zeros_like(t_v)], axis=1)
            deltas = (labels[_tuple_rank(tup_j, n)] - labels[_tuple_rank(tup_0, n)]) % p
            np.add.at(votes, (j_v, deltas), 1)
    diffs = votes.argmax(axis=1)
    diffs[0] = 0
    return diffs.astype(np.int64)


def _assemble_candidates(diffs: dict[int, np.ndarray], primes: list[int],
                         d: int, n: int) -> list[np.ndarray]:
    """CRT-combine per-prime difference vectors over conjugation/offset choices."""
    # CRT basis: for each prime power q | d, an element == 1 mod q, 0 elsewhere
    basis = {}
    for p in primes:
        q = 1
        dd = d
        while dd % p == 0:
            q *= p
            dd //= p
        rest = d // q
        basis[p] = rest * pow(rest, -1, q)

    variants = {p: [] for p in primes}
    for p in primes:
        for sign in (1, -1):
            for offset in range(p):
                variants[p].append((sign * diffs[p] + offset) % p)

    candidates = []
    stack = [np.zeros(n, dtype=np.int64)]
    for p in primes:
        nxt = []
        for partial in stack:
            for var in variants[p]:
                nxt.append((partial + basis[p] * var) % d)
        stack = nxt
    candidates.extend(stack)
    return candidates
