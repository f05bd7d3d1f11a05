"""Statistical query oracles over the challenge/response distribution.

Two oracle flavors are simulated, both audited through OracleStats:

* one_mstat(L): draws a single fresh clause/response sample and returns
  h(sample) for a caller-supplied h with range {0..L-1} (or None to skip).
  Batched variants draw many samples at once; every drawn sample counts as
  one query.
* vstat(T): estimates the mean of a {0,1} query to within
  tau = max(1/T, sqrt(p(1-p)/T)).  The honest mode samples; the
  adversarial mode returns a worst-case band edge computed from the exact
  mean, for tests that must tolerate any legal oracle answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hcpw.params import SchemeParams
from hcpw.rng import make_rng
from hcpw.scheme import SecretMapping, draw_clause_array, eval_on_mapping


class SampleBudgetExceeded(Exception):
    pass


@dataclass
class OracleStats:
    one_mstat_queries: int = 0
    vstat_queries: int = 0
    samples_consumed: int = 0
    range_size: int = 0  # L of the widest one_mstat query seen
    precision_t: int = 0  # largest VSTAT T seen
    budget: int | None = None

    def charge(self, samples: int) -> None:
        self.samples_consumed += samples
        if self.budget is not None and self.samples_consumed > self.budget:
            raise SampleBudgetExceeded(
                f"consumed {self.samples_consumed} > budget {self.budget}"
            )


class ChallengeDistribution:
    """Fresh clause/response samples induced by a hidden mapping."""

    def __init__(self, mapping: SecretMapping, seed_or_rng: int | np.random.Generator):
        self.mapping = mapping
        self.params: SchemeParams = mapping.params
        self.rng = make_rng(seed_or_rng)

    def draw(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        clauses = draw_clause_array(self.params, count, self.rng)
        return clauses, eval_on_mapping(self.mapping, clauses)


class StatOracle:
    def __init__(self, dist: ChallengeDistribution, budget: int | None = None):
        self.dist = dist
        self.stats = OracleStats(budget=budget)

    def one_mstat(self, h, range_size: int):
        """One fresh sample; returns h(clause, response) in {0..L-1} or None."""
        clauses, responses = self.dist.draw(1)
        self.stats.one_mstat_queries += 1
        self.stats.range_size = max(self.stats.range_size, range_size)
        self.stats.charge(1)
        return h(clauses[0], int(responses[0]))

    def one_mstat_batch(self, h_batch, range_size: int, count: int):
        """`count` queries at once; h_batch maps arrays to values/None mask."""
        clauses, responses = self.dist.draw(count)
        self.stats.one_mstat_queries += count
        self.stats.range_size = max(self.stats.range_size, range_size)
        self.stats.charge(count)
        return h_batch(clauses, responses)

    def vstat(self, h_batch, t_param: int, adversarial: bool = False,
              exact_mean: float | None = None) -> float:
        """Estimate E[h] for h with range {0,1} to within the VSTAT band.

        Honest mode draws enough samples for the empirical mean to sit
        inside the band with overwhelming probability.  Adversarial mode
        requires the exact mean and returns the worst band edge.
        """
        self.stats.vstat_queries += 1
        self.stats.precision_t = max(self.stats.precision_t, t_param)
        if adversarial:
            if exact_mean is None:
                raise ValueError("adversarial mode needs the exact mean")
            p = exact_mean
            tau = max(1.0 / t_param, math.sqrt(p * (1 - p) / t_param))
            low, high = p - tau, p + tau
            return low if abs(low - 0.5) > abs(high - 0.5) else high
        clauses, responses = self.dist.draw(t_param)
        self.stats.charge(t_param)
        p_hat = float(np.mean(h_batch(clauses, responses)))
        tau = max(1.0 / t_param, math.sqrt(p_hat * (1 - p_hat) / t_param))
        extra = max(t_param, math.ceil(1.0 / (tau * tau))) - t_param
        if extra > 0:
            clauses, responses = self.dist.draw(extra)
            self.stats.charge(extra)
            total = p_hat * t_param + float(np.sum(h_batch(clauses, responses)))
            p_hat = total / (t_param + extra)
        return p_hat
