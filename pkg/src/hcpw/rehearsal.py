"""Rehearsal-effort model: expanding schedules and natural visit coverage.

A memorized association must be rehearsed once in each window
[2^(i*s), 2^((i+1)*s)) of days (s = association strength, default 1).
Visits to an account naturally rehearse the mapping positions its
challenges touch; positions not covered in a window cost one extra
rehearsal.  With accounts visited by independent Poisson processes the
expected number of extra rehearsals over a horizon has the closed form

    sum_cues sum_i exp(-rate(cue) * (t_{i+1} - t_i)),

summed over the windows fully contained in the horizon (the trailing
partial window is excluded by default; both readings are reported when
they differ).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hcpw.params import SchemeParams
from hcpw.rng import make_rng
from hcpw.scheme import (
    Clause,
    PasswordChallenge,
    SecretMapping,
    gen_mapping,
    recalled_indices,
)


@dataclass(frozen=True)
class RehearsalSchedule:
    """Expanding windows [2^(i*s), 2^((i+1)*s)) measured in days."""

    association_strength: float = 1.0
    horizon: float = 365.0

    def __post_init__(self) -> None:
        if self.association_strength <= 0:
            raise ValueError("association strength must be positive")
        if self.horizon < 1:
            raise ValueError("horizon must cover at least one day")

    def boundaries(self) -> list[float]:
        """Strictly increasing t_i = 2^(i*s), first boundary 1, until past horizon."""
        out = []
        i = 0
        while True:
            t = 2.0 ** (i * self.association_strength)
            out.append(t)
            if t >= self.horizon:
                break
            i += 1
        return out

    def window_widths(self, include_partial: bool = False) -> np.ndarray:
        b = self.boundaries()
        widths = [b[i + 1] - b[i] for i in range(len(b) - 1)
                  if include_partial or b[i + 1] <= self.horizon]
        return np.array(widths, dtype=float)


@dataclass(frozen=True)
class VisitationProfile:
    """Bucketed account visit rates: (visits/day, number of accounts)."""

    name: str
    buckets: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        for rate, count in self.buckets:
            if rate <= 0:
                raise ValueError("visit rates must be positive")
            if count < 0:
                raise ValueError("account counts must be nonnegative")

    @property
    def total_accounts(self) -> int:
        return sum(count for _, count in self.buckets)

    def account_rates(self) -> list[float]:
        return [rate for rate, count in self.buckets for _ in range(count)]


_PROFILE_RATES = (1.0, 1 / 3, 1 / 7, 1 / 31, 1 / 365)
_PROFILE_COUNTS = {
    "very_active": (10, 10, 10, 10, 35),
    "typical": (5, 10, 10, 10, 40),
    "occasional": (2, 10, 20, 20, 23),
    "infrequent": (0, 2, 5, 10, 58),
}


def build_profiles() -> dict[str, VisitationProfile]:
    """The four named visitation profiles."""
    return {
        name: VisitationProfile(
            name=name,
            buckets=tuple(zip(_PROFILE_RATES, counts)),
        )
        for name, counts in _PROFILE_COUNTS.items()
    }


@dataclass
class CueCoverage:
    """Aggregate visit rate per mapping position, plus per-account cue sets."""

    rates: np.ndarray  # (n,) sum of covering accounts' visit rates
    account_cues: list[set[int]] = field(default_factory=list)
    account_rates: list[float] = field(default_factory=list)


def account_cue_set(mapping: SecretMapping, challenge: PasswordChallenge) -> set[int]:
    cues: set[int] = set()
    for clause in challenge.clauses:
        cues |= recalled_indices(mapping.params, mapping, clause)
    return cues


def cue_coverage(
    mapping: SecretMapping, accounts: list[tuple[PasswordChallenge, float]]
) -> CueCoverage:
    rates = np.zeros(mapping.params.n, dtype=float)
    account_cues = []
    account_rates = []
    for challenge, rate in accounts:
        cues = account_cue_set(mapping, challenge)
        for c in cues:
            rates[c] += rate
        account_cues.append(cues)
        account_rates.append(rate)
    return CueCoverage(rates=rates, account_cues=account_cues, account_rates=account_rates)


def expected_extra_rehearsals(
    schedule: RehearsalSchedule,
    coverage: CueCoverage | np.ndarray,
    include_partial: bool = False,
) -> float:
    """Closed-form expected extra rehearsals across all cues."""
    rates = coverage.rates if isinstance(coverage, CueCoverage) else np.asarray(coverage)
    widths = schedule.window_widths(include_partial=include_partial)
    return float(np.exp(-np.outer(rates, widths)).sum())


def simulate_extra_rehearsals(
    schedule: RehearsalSchedule,
    coverage: CueCoverage,
    seed_or_rng: int | np.random.Generator,
    trials: int,
    include_partial: bool = False,
) -> tuple[float, tuple[float, float]]:
    """Monte-Carlo estimate with a 95% confidence interval.

    Accounts visit by independent Poisson processes; a cue's window is
    satisfied when any covering account records a visit inside it.  The
    simulation draws per-window visit counts, which realize exactly the
    process restricted to window occupancy (independent increments).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = make_rng(seed_or_rng)
    widths = schedule.window_widths(include_partial=include_partial)
    n_cues = len(coverage.rates)
    n_accounts = len(coverage.account_rates)
    n_windows = len(widths)
    if n_accounts == 0 or n_windows == 0:
        total = float(n_cues * n_windows)
        return total, (total, total)

    member = np.zeros((n_accounts, n_cues), dtype=bool)
    for a, cues in enumerate(coverage.account_cues):
        member[a, list(cues)] = True
    lam = np.asarray(coverage.account_rates, dtype=float)

    totals = np.empty(trials, dtype=float)
    chunk = max(1, min(trials, int(2e7) // max(1, n_accounts * n_windows)))
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        counts = rng.poisson(lam[None, :, None] * widths[None, None, :],
                             size=(size, n_accounts, n_windows))
        visited = counts > 0  # (trials, accounts, windows)
        covered = np.einsum("taw,ac->tcw", visited.astype(np.uint8), member.astype(np.uint8))
        missed = (covered == 0).sum(axis=(1, 2))
        totals[done:done + size] = missed
        done += size
    mean = float(totals.mean())
    half = 1.96 * float(totals.std(ddof=1)) / np.sqrt(trials) if trials > 1 else 0.0
    return mean, (mean - half, mean + half)


def draw_account_challenge(
    params: SchemeParams,
    rng: np.random.Generator,
    deal_variables: bool = True,
) -> PasswordChallenge:
    """Challenges for one account, for coverage studies.

    With deal_variables the t clauses draw their positions from a
    reshuffled deck so an account's challenges repeat variables as little
    as possible; this matches the coverage behind the published
    effort table.  Without it the clauses are drawn independently, exactly
    as the account-creation operation does.
    """
    from hcpw.scheme import gen_clause

    if not deal_variables:
        clauses = tuple(gen_clause(params, rng) for _ in range(params.t))
        return PasswordChallenge(params=params, clauses=clauses)
    w = params.clause_width()
    deck: list[int] = []
    clauses = []
    for _ in range(params.t):
        if len(deck) < w:
            deck = [int(v) for v in rng.permutation(params.n)]
        clauses.append(Clause(params=params, indices=tuple(deck[:w])))
        deck = deck[w:]
    return PasswordChallenge(params=params, clauses=tuple(clauses))


def table_report(
    params: SchemeParams,
    profile: VisitationProfile,
    draws: int = 100,
    seed: int = 0,
    schedule: RehearsalSchedule | None = None,
    deal_variables: bool = True,
) -> dict:
    """Mean expected extra rehearsals over fresh mapping/challenge draws.

    Reports the dealt-variable mean (the published-table convention), the
    independent-clause mean, and the partial-window delta when it exceeds
    one percent.
    """
    if schedule is None:
        schedule = RehearsalSchedule()
    rng = make_rng(seed)
    rates = profile.account_rates()
    values = np.empty(draws, dtype=float)
    values_iid = np.empty(draws, dtype=float)
    values_partial = np.empty(draws, dtype=float)
    pooled_rates: list[np.ndarray] = []
    for r in range(draws):
        mapping = gen_mapping(params, rng)
        accounts = [(draw_account_challenge(params, rng, deal_variables), lam)
                    for lam in rates]
        cov = cue_coverage(mapping, accounts)
        accounts_iid = [(draw_account_challenge(params, rng, False), lam)
                        for lam in rates]
        cov_iid = cue_coverage(mapping, accounts_iid)
        values[r] = expected_extra_rehearsals(schedule, cov)
        values_partial[r] = expected_extra_rehearsals(schedule, cov, include_partial=True)
        values_iid[r] = expected_extra_rehearsals(schedule, cov_iid)
        pooled_rates.append(cov.rates)
    mean = float(values.mean())
    half = 1.96 * float(values.std(ddof=1)) / np.sqrt(draws) if draws > 1 else 0.0
    pooled = np.concatenate(pooled_rates)
    hist_counts, hist_edges = np.histogram(pooled, bins=10)
    report = {
        "profile": profile.name,
        "n": params.n,
        "mean": mean,
        "ci": [mean - half, mean + half],
        "mean_independent_clauses": float(values_iid.mean()),
        "per_cue_histogram": {
            "rate_bin_edges": [float(e) for e in hist_edges],
            "counts": [int(c) for c in hist_counts],
        },
        "draws": draws,
    }
    partial_mean = float(values_partial.mean())
    if mean > 0 and abs(partial_mean - mean) / mean > 0.01:
        report["mean_with_partial_window"] = partial_mean
    return report
