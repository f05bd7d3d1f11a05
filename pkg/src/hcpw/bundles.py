"""Public challenge bundles: serialization, generation, grading.

A bundle carries m answered clause/response pairs and 20 unanswered
length-t password challenges, all consistent with one hidden mapping that
is written to a separate sealed file for later grading.  The bundle also
carries a digest commitment to the generation seed (never the seed).

File format: UTF-8 JSON with fixed key order
{version, params{d,k1,k2,n,t}, pairs[{clause[], response}],
 password_challenges[[clause[], ...]], seed_commitment{algorithm, salt, digest}}.
Serialization is byte-stable for a fixed seed.  Bundle extension .hcpb;
sealed mapping extension .hcps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hcpw.accounts import HASH_ALGORITHMS
from hcpw.params import SchemeParams
from hcpw.rng import make_rng
from hcpw.scheme import (
    Clause,
    PasswordChallenge,
    SecretMapping,
    draw_clause_array,
    eval_on_mapping,
    gen_mapping,
    gen_password_challenge,
    respond,
)

BUNDLE_VERSION = 1
PASSWORD_CHALLENGE_COUNT = 20


@dataclass
class ChallengeBundle:
    params: SchemeParams
    pair_clauses: np.ndarray  # (m, clause_width())
    pair_responses: np.ndarray  # (m,)
    password_challenges: list[PasswordChallenge]
    seed_commitment: dict

    @property
    def m(self) -> int:
        return len(self.pair_clauses)

    def to_json_bytes(self) -> bytes:
        obj = {
            "version": BUNDLE_VERSION,
            "params": self.params.to_dict(),
            "pairs": [
                {"clause": [int(v) for v in clause], "response": int(resp)}
                for clause, resp in zip(self.pair_clauses, self.pair_responses)
            ],
            "password_challenges": [
                [[int(v) for v in clause.indices] for clause in challenge.clauses]
                for challenge in self.password_challenges
            ],
            "seed_commitment": self.seed_commitment,
        }
        return (json.dumps(obj, separators=(",", ":")) + "\n").encode("utf-8")

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_json_bytes())

    @classmethod
    def from_json_bytes(cls, data: bytes) -> "ChallengeBundle":
        obj = json.loads(data.decode("utf-8"))
        if obj.get("version") != BUNDLE_VERSION:
            raise ValueError(f"unsupported bundle version {obj.get('version')!r}")
        params = SchemeParams.from_dict(obj["params"])
        w = params.clause_width()
        pairs = obj["pairs"]
        clauses = np.zeros((len(pairs), w), dtype=np.int64)
        responses = np.zeros(len(pairs), dtype=np.int64)
        for i, pair in enumerate(pairs):
            clause = _validated_clause(pair["clause"], params)
            clauses[i] = clause
            resp = int(pair["response"])
            if not 0 <= resp < params.d:
                raise ValueError(f"pair {i}: response {resp} outside Z_{params.d}")
            responses[i] = resp
        challenges = []
        for rows in obj["password_challenges"]:
            if len(rows) != params.t:
                raise ValueError("password challenge length does not match t")
            challenge = PasswordChallenge(
                params=params,
                clauses=tuple(
                    Clause(params=params, indices=tuple(_validated_clause(row, params)))
                    for row in rows
                ),
            )
            challenges.append(challenge)
        return cls(params=params, pair_clauses=clauses, pair_responses=responses,
                   password_challenges=challenges,
                   seed_commitment=obj["seed_commitment"])

    @classmethod
    def load(cls, path: str | Path) -> "ChallengeBundle":
        return cls.from_json_bytes(Path(path).read_bytes())


def _validated_clause(values, params: SchemeParams) -> list[int]:
    idx = [int(v) for v in values]
    if len(idx) != params.clause_width():
        raise ValueError("clause width mismatch")
    if len(set(idx)) != len(idx):
        raise ValueError("clause with repeated indices rejected")
    if min(idx) < 0 or max(idx) >= params.n:
        raise ValueError("clause index out of range")
    return idx


def publish(
    params: SchemeParams, m: int, seed: int, commitment_algorithm: str = "scrypt"
) -> tuple[ChallengeBundle, SecretMapping]:
    """Generate a bundle plus the sealed mapping it is consistent with."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    rng = make_rng(seed)
    mapping = gen_mapping(params, rng)
    clauses = draw_clause_array(params, m, rng) if m else np.zeros(
        (0, params.clause_width()), dtype=np.int64)
    responses = eval_on_mapping(mapping, clauses) if m else np.zeros(0, dtype=np.int64)
    challenges = [gen_password_challenge(params, rng)
                  for _ in range(PASSWORD_CHALLENGE_COUNT)]
    salt = rng.bytes(16)
    digest = HASH_ALGORITHMS[commitment_algorithm](
        int(seed).to_bytes(8, "little", signed=False), salt)
    bundle = ChallengeBundle(
        params=params,
        pair_clauses=clauses,
        pair_responses=responses,
        password_challenges=challenges,
        seed_commitment={
            "algorithm": commitment_algorithm,
            "salt": salt.hex(),
            "digest": digest.hex(),
        },
    )
    # generation-time consistency check: every published response matches
    assert bundle.m == 0 or bool(
        np.array_equal(eval_on_mapping(mapping, bundle.pair_clauses), bundle.pair_responses)
    )
    return bundle, mapping


def grade(bundle: ChallengeBundle, mapping: SecretMapping,
          submission: dict[int, str]) -> list[dict]:
    """Win/lose verdict per submitted password challenge index."""
    results = []
    for index, guess in submission.items():
        idx = int(index)
        if not 0 <= idx < len(bundle.password_challenges):
            raise ValueError(f"challenge index {idx} out of range")
        expected = respond(mapping, bundle.password_challenges[idx])
        if len(str(guess)) != bundle.params.t:
            raise ValueError(f"submission for challenge {idx} must have t={bundle.params.t} digits")
        results.append({"index": idx, "win": str(guess) == expected})
    return results
