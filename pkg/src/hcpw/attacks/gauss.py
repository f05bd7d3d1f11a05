"""Linear-algebra attacks: guess the index variables, extract, solve.

A clause/response pair yields a linear constraint as soon as the values of
the clause's index variables are known: the index sum selects the table
slot, and slot value + tail values = response (mod d).  The attack guesses
the hidden values on a small index set, extracts constraints from every
pair whose index variables all fall inside the guessed set, solves the
accumulated system over Z_d, and accepts the first candidate that
reproduces every pair.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from hcpw.instances import PlantedInstance
from hcpw.modlinear import LinearConstraint, enumerate_family, solve_matrix_mod
from hcpw.params import SchemeParams
from hcpw.rng import make_rng


@dataclass
class AttackReport:
    success: bool
    sigma: np.ndarray | None
    stats: dict = field(default_factory=dict)
    pairs_checked: int = 0
    elapsed: float = 0.0


def try_extract(
    params: SchemeParams,
    clause_indices,
    response: int,
    guessed_indices,
    guessed_values,
) -> LinearConstraint | None:
    """Extract a linear constraint under the guess sigma[guessed] = values.

    Returns None when some index variable of the clause lies outside the
    guessed set (the slot cannot be identified), or when substitution of
    guessed values leaves no unknown terms.
    """
    if len(guessed_indices) != len(guessed_values):
        raise ValueError("guess index/value length mismatch")
    guess = {int(i): int(v) for i, v in zip(guessed_indices, guessed_values)}
    clause = [int(i) for i in clause_indices]
    d, k1 = params.d, params.k1
    index_vars = clause[d:d + k1]
    if any(i not in guess for i in index_vars):
        return None
    j = sum(guess[i] for i in index_vars) % d
    raw_terms = [clause[j]] + clause[d + k1:]
    constant = int(response)
    terms = []
    for idx in raw_terms:
        if idx in guess:
            constant = (constant - guess[idx]) % d
        else:
            terms.append((idx, 1))
    if not terms:
        return None
    return LinearConstraint(terms=tuple(terms), constant=constant % d)


def _extract_rows(
    params: SchemeParams,
    clauses: np.ndarray,
    responses: np.ndarray,
    guess_idx: np.ndarray,
    guess_val: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Vectorized extraction over all pairs for one guess.

    Returns (A, b, extracted_count) where A includes one row per extracted
    constraint plus one pinning row per guessed index.
    """
    d, k1, n = params.d, params.k1, params.n
    value_of = np.full(n, -1, dtype=np.int64)
    value_of[guess_idx] = guess_val

    index_vars = clauses[:, d:d + k1]
    mask = np.all(value_of[index_vars] >= 0, axis=1)
    hit = np.flatnonzero(mask)
    extracted = len(hit)

    j = value_of[index_vars[hit]].sum(axis=1) % d
    slot_idx = np.take_along_axis(clauses[hit], j[:, None], axis=1)[:, 0]
    tail_idx = clauses[hit][:, d + k1:]
    term_idx = np.concatenate([slot_idx[:, None], tail_idx], axis=1)

    rows = extracted + len(guess_idx)
    a = np.zeros((rows, n), dtype=np.int64)
    b = np.zeros(rows, dtype=np.int64)
    if extracted:
        r = np.repeat(np.arange(extracted), term_idx.shape[1])
        np.add.at(a, (r, term_idx.ravel()), 1)
        b[:extracted] = responses[hit]
        # substitute guessed values appearing among the terms
        known = value_of[term_idx]
        known_sum = np.where(known >= 0, known, 0).sum(axis=1)
        b[:extracted] = (b[:extracted] - known_sum) % d
        guessed_mask = value_of >= 0
        a[:extracted, guessed_mask] = 0
    a[np.arange(extracted, rows), guess_idx] = 1
    b[extracted:] = guess_val
    return a, b, extracted


FAMILY_ENUMERATION_CAP = 512


def _candidates_from_guess(
    instance: PlantedInstance, guess_idx: np.ndarray, guess_val: np.ndarray
) -> tuple[list[np.ndarray], int, str]:
    """Solve the extracted system; small solution families are enumerated
    (canonical representative first) so rank-deficient systems still get
    checked against the pairs."""
    params = instance.params
    a, b, extracted = _extract_rows(params, instance.clauses, instance.responses,
                                    guess_idx, guess_val)
    if extracted < params.n:
        return [], extracted, "insufficient"
    result = solve_matrix_mod(a % params.d, b % params.d, params.d)
    if result.status == "inconsistent":
        return [], extracted, "inconsistent"
    return enumerate_family(result, cap=FAMILY_ENUMERATION_CAP), extracted, result.status


def gaussian_attack(
    instance: PlantedInstance,
    g: int | None = None,
    max_guesses: int | None = None,
) -> AttackReport:
    """Enumerate guesses over ordered g-tuples in lexicographic order.

    g defaults to k1, the number of index variables.  A candidate is
    accepted only when it reproduces every pair's response; the first
    accepting guess in canonical order wins, making the result
    deterministic however the guesses might be scheduled.
    """
    t0 = time.time()
    params = instance.params
    if g is None:
        g = params.k1
    d, n = params.d, params.n
    guesses_tried = 0
    max_extracted = 0
    for s_tuple in itertools.permutations(range(n), g):
        for alpha in itertools.product(range(d), repeat=g):
            if max_guesses is not None and guesses_tried >= max_guesses:
                return AttackReport(
                    success=False, sigma=None, elapsed=time.time() - t0,
                    stats={"reason": "guess budget exhausted",
                           "guesses_tried": guesses_tried,
                           "max_extracted": max_extracted},
                )
            guesses_tried += 1
            guess_idx = np.array(s_tuple, dtype=np.int64)
            guess_val = np.array(alpha, dtype=np.int64)
            cands, extracted, status = _candidates_from_guess(instance, guess_idx, guess_val)
            max_extracted = max(max_extracted, extracted)
            for cand in cands:
                if instance.consistent(cand):
                    return AttackReport(
                        success=True, sigma=cand, elapsed=time.time() - t0,
                        pairs_checked=instance.m,
                        stats={"guesses_tried": guesses_tried,
                               "accepted_guess": {"indices": list(s_tuple), "values": list(alpha)},
                               "extracted": extracted, "solve_status": status},
                    )
    return AttackReport(
        success=False, sigma=None, elapsed=time.time() - t0,
        stats={"reason": "no accepting guess",
               "guesses_tried": guesses_tried, "max_extracted": max_extracted},
    )


def partial_guess_attack(
    instance: PlantedInstance,
    guess_size: int,
    seed_or_rng: int | np.random.Generator = 0,
    max_assignments: int | None = None,
) -> AttackReport:
    """Guess the mapping on one random index set of size `guess_size`.

    Larger guessed sets make per-pair extraction more likely (every index
    variable must land in the set), trading d^guess_size enumeration time
    for fewer required pairs.  guess_size = 0 falls back to the plain
    guess-the-index-variables attack.
    """
    t0 = time.time()
    params = instance.params
    if guess_size == 0:
        return gaussian_attack(instance)
    if guess_size < params.k1:
        return AttackReport(
            success=False, sigma=None, elapsed=time.time() - t0,
            stats={"reason": f"guess_size {guess_size} < k1={params.k1}: "
                             "no clause can have all index variables guessed"},
        )
    rng = make_rng(seed_or_rng)
    guess_idx = np.sort(rng.choice(params.n, size=guess_size, replace=False))
    d = params.d
    tried = 0
    max_extracted = 0
    for alpha in itertools.product(range(d), repeat=guess_size):
        if max_assignments is not None and tried >= max_assignments:
            return AttackReport(
                success=False, sigma=None, elapsed=time.time() - t0,
                stats={"reason": "assignment budget exhausted", "tried": tried,
                       "guess_indices": guess_idx.tolist(),
                       "max_extracted": max_extracted},
            )
        tried += 1
        guess_val = np.array(alpha, dtype=np.int64)
        cands, extracted, _status = _candidates_from_guess(instance, guess_idx, guess_val)
        max_extracted = max(max_extracted, extracted)
        for cand in cands:
            if instance.consistent(cand):
                return AttackReport(
                    success=True, sigma=cand, elapsed=time.time() - t0,
                    pairs_checked=instance.m,
                    stats={"tried": tried, "guess_indices": guess_idx.tolist(),
                           "guess_values": list(alpha), "extracted": extracted,
                           "expected_assignments": d**guess_size},
                )
    return AttackReport(
        success=False, sigma=None, elapsed=time.time() - t0,
        stats={"reason": "no accepting assignment", "tried": tried,
               "guess_indices": guess_idx.tolist(), "max_extracted": max_extracted},
    )
