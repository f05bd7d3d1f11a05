"""Planted challenge/response instances used to benchmark attacks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hcpw.params import SchemeParams
from hcpw.rng import make_rng
from hcpw.scheme import (
    SecretMapping,
    draw_clause_array,
    eval_on_mapping,
    gen_mapping,
    gen_password_challenge,
)


@dataclass
class PlantedInstance:
    """m uniformly drawn clause/response pairs consistent with a hidden mapping."""

    params: SchemeParams
    mapping: SecretMapping | None  # hidden from attacks; None when only pairs are known
    clauses: np.ndarray  # (m, clause_width())
    responses: np.ndarray  # (m,)
    holdout: list = None  # optional unanswered password challenges

    @property
    def m(self) -> int:
        return len(self.clauses)

    def consistent(self, candidate: np.ndarray) -> bool:
        """Does the candidate mapping reproduce every pair?"""
        cand = SecretMapping(params=self.params, digits=np.asarray(candidate))
        if self.m == 0:
            return True
        return bool(np.array_equal(eval_on_mapping(cand, self.clauses), self.responses))

    def consistency_fraction(self, candidate: np.ndarray) -> float:
        if self.m == 0:
            return 1.0
        cand = SecretMapping(params=self.params, digits=np.asarray(candidate))
        return float(np.mean(eval_on_mapping(cand, self.clauses) == self.responses))


def generate_instance(
    params: SchemeParams,
    m: int,
    seed_or_rng: int | np.random.Generator,
    holdout_challenges: int = 0,
) -> PlantedInstance:
    rng = make_rng(seed_or_rng)
    mapping = gen_mapping(params, rng)
    clauses = draw_clause_array(params, m, rng) if m else np.zeros((0, params.clause_width()), dtype=np.int64)
    responses = eval_on_mapping(mapping, clauses) if m else np.zeros(0, dtype=np.int64)
    holdout = [gen_password_challenge(params, rng) for _ in range(holdout_challenges)]
    return PlantedInstance(params=params, mapping=mapping, clauses=clauses,
                           responses=responses, holdout=holdout)
