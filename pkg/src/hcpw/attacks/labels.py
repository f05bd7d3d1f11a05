"""Reductions between forging responses and recovering the mapping.

The response function has the form g(first k-1 values) + last value
(mod d), so labels for clauses sharing a common k-1 prefix differ exactly
by the mapped digits of their last coordinates.  Given labels that beat
random guessing, pinning one pivot digit and telescoping the label
differences recovers a mapping correlated with the hidden one.

The converse direction turns a password-challenge forger into a
single-clause labeler: plant the target clause at a random slot of a
holdout challenge, keep the forger's answer only when its earlier slots
were answered correctly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hcpw.instances import PlantedInstance
from hcpw.params import SchemeParams
from hcpw.rng import make_rng
from hcpw.scheme import draw_clause_array, eval_on_mapping, eval_values_batch


def noisy_labeler(instance: PlantedInstance, accuracy: float,
                  seed_or_rng: int | np.random.Generator):
    """Label function with Pr[label = true response] == accuracy.

    With probability q the true response is returned, otherwise a uniform
    digit; q is set so the overall accuracy meets the target.
    """
    d = instance.params.d
    if not (1.0 / d <= accuracy <= 1.0):
        raise ValueError(f"accuracy must lie in [1/d, 1], got {accuracy}")
    q = (accuracy - 1.0 / d) / (1.0 - 1.0 / d)
    rng = make_rng(seed_or_rng)

    def labels(clauses: np.ndarray) -> np.ndarray:
        truth = eval_on_mapping(instance.mapping, clauses)
        keep = rng.random(len(truth)) < q
        noise = rng.integers(0, d, size=len(truth))
        return np.where(keep, truth, noise)

    return labels


@dataclass
class LabelRecovery:
    sigma: np.ndarray
    score: float  # validation agreement of the returned candidate
    stats: dict = field(default_factory=dict)


class DifferenceValidator:
    """Scores candidates against labeled prefix families.

    Each family labels the clauses (prefix, j) for every j outside a fixed
    k-1 prefix.  A candidate is scored by how often its digit differences
    reproduce the label differences, sigma[j] - sigma[j0] == label_j -
    label_j0 (mod d); the family structure makes the score sensitive to
    per-position agreement rather than to whole-clause evaluation, whose
    signal vanishes quickly under label noise.
    """

    def __init__(self, params: SchemeParams, labels, rng: np.random.Generator,
                 families: int = 24):
        d, n, w = params.d, params.n, params.clause_width()
        self.d = d
        self.positions = []
        self.anchors = []
        self.deltas = []
        for _ in range(families):
            perm = rng.permutation(n)
            prefix = perm[: w - 1]
            rest = np.sort(perm[w - 1:])
            block = np.tile(np.concatenate([prefix, [0]]), (len(rest), 1))
            block[:, -1] = rest
            lab = np.asarray(labels(block), dtype=np.int64)
            self.positions.append(rest)
            self.anchors.append(int(rest[0]))
            self.deltas.append((lab - lab[0]) % d)
        self.samples = sum(len(r) for r in self.positions)

    def score(self, candidate: np.ndarray) -> float:
        hits = 0
        for rest, anchor, delta in zip(self.positions, self.anchors, self.deltas):
            cand_delta = (candidate[rest] - candidate[anchor]) % self.d
            hits += int(np.count_nonzero(cand_delta == delta))
        return hits / self.samples


def telescope_candidate(
    params: SchemeParams,
    labels,
    rng: np.random.Generator,
    pivot_value: int | None = None,
) -> np.ndarray:
    """One telescoping draw: random k-1 prefix, random pivot, label differences.

    The candidate sets sigma[j] = pivot_value + label_j - label_pivot for
    every j outside the prefix and fills the prefix uniformly.  With
    pivot_value None a uniform pivot digit is drawn, matching the
    success-probability analysis of a single draw.
    """
    d, n, w = params.d, params.n, params.clause_width()
    perm = rng.permutation(n)
    prefix = perm[: w - 1]
    rest = np.sort(perm[w - 1:])
    pivot = rest[rng.integers(0, len(rest))]

    block = np.tile(np.concatenate([prefix, [0]]), (len(rest), 1))
    block[:, -1] = rest
    lab = np.asarray(labels(block), dtype=np.int64)
    lab_pivot = int(lab[rest == pivot][0])

    if pivot_value is None:
        pivot_value = int(rng.integers(0, d))
    cand = np.zeros(n, dtype=np.int64)
    cand[rest] = (pivot_value + lab - lab_pivot) % d
    cand[prefix] = rng.integers(0, d, size=len(prefix))
    return cand


def recover_from_labels(
    params: SchemeParams,
    labels,
    seed_or_rng: int | np.random.Generator,
    restarts: int = 1,
    validation_families: int = 24,
    shift_validation_size: int = 20_000,
    validator: DifferenceValidator | None = None,
) -> LabelRecovery:
    """Amplified recovery: telescoped draws, difference voting, shift search.

    Restart candidates are ranked by the shift-invariant difference score.
    The top quartile then votes position by position on the digit
    differences relative to an anchor (each candidate knows sigma only up
    to a global shift, but differences cancel shifts), which concentrates
    the per-restart accuracy into a near-exact base.  The d global shifts
    of the voted base are finally told apart by whole-response agreement
    against freshly labeled clauses.  Always returns a candidate; quality
    is probabilistic.
    """
    rng = make_rng(seed_or_rng)
    d, n = params.d, params.n

    if validator is None:
        validator = DifferenceValidator(params, labels, rng, families=validation_families)

    scored: list[tuple[float, np.ndarray]] = []
    for _ in range(restarts):
        cand = telescope_candidate(params, labels, rng, pivot_value=0)
        scored.append((validator.score(cand), cand))
    scored.sort(key=lambda sc: -sc[0])
    top = [cand for _, cand in scored[: max(1, len(scored) // 4)]]

    # per-position vote on anchor-relative differences
    votes = np.zeros((n, d), dtype=np.int64)
    for cand in top:
        rel = (cand - cand[0]) % d
        votes[np.arange(n), rel] += 1
    base = votes.argmax(axis=1).astype(np.int64)

    shift_clauses = draw_clause_array(params, shift_validation_size, rng)
    shift_labels = np.asarray(labels(shift_clauses), dtype=np.int64)
    best_shift: tuple[float, np.ndarray] | None = None
    for c in range(d):
        cand = (base + c) % d
        agreement = float(np.mean(
            eval_values_batch(params, cand[shift_clauses]) == shift_labels))
        if best_shift is None or agreement > best_shift[0]:
            best_shift = (agreement, cand)

    return LabelRecovery(sigma=best_shift[1], score=scored[0][0],
                         stats={"restarts": restarts,
                                "validation_samples": validator.samples,
                                "voters": len(top),
                                "shift_agreement": best_shift[0]})


def forgery_to_labels(
    adversary,
    holdout_clauses: np.ndarray,
    holdout_responses: np.ndarray,
    target_clause: np.ndarray,
    seed_or_rng: int | np.random.Generator,
    d: int = 10,
    retry_cap: int | None = None,
):
    """Extract a label for `target_clause` from a password-challenge forger.

    Repeatedly: pick a random slot i, substitute the target clause there,
    query the forger on the modified challenge, and accept slot i's answer
    only if every earlier slot was answered correctly.  Returns the digit,
    or None (abstain) once the retry cap is hit.
    """
    rng = make_rng(seed_or_rng)
    t = len(holdout_clauses)
    if retry_cap is None:
        retry_cap = 10 * t * d
    for _ in range(retry_cap):
        i = int(rng.integers(0, t))
        challenge = holdout_clauses.copy()
        challenge[i] = target_clause
        answer = np.asarray(adversary(challenge), dtype=np.int64)
        if np.array_equal(answer[:i], holdout_responses[:i]):
            return int(answer[i])
    return None
