import numpy as np
import pytest

from hcpw.params import SchemeParams
from hcpw.rehearsal import (
    CueCoverage,
    RehearsalSchedule,
    VisitationProfile,
    account_cue_set,
    build_profiles,
    cue_coverage,
    draw_account_challenge,
    expected_extra_rehearsals,
    simulate_extra_rehearsals,
    table_report,
)
from hcpw.rng import make_rng
from hcpw.scheme import gen_mapping, gen_password_challenge

P = SchemeParams(d=10, k1=2, k2=2, n=100, t=10)


def test_schedule_boundaries():
    s = RehearsalSchedule()
    b = s.boundaries()
    assert b[0] == 1.0
    assert all(b[i + 1] == 2 * b[i] for i in range(len(b) - 1))
    widths = s.window_widths()
    assert widths.tolist() == [2.0**i for i in range(8)]  # last full window [128,256)
    with_partial = s.window_widths(include_partial=True)
    assert len(with_partial) == 9


def test_profiles_match_published_rows():
    profiles = build_profiles()
    assert profiles["typical"].total_accounts == 75
    assert dict(profiles["infrequent"].buckets)[1.0] == 0
    for prof in profiles.values():
        assert all(count >= 0 for _, count in prof.buckets)
    counts = [count for _, count in profiles["very_active"].buckets]
    assert counts == [10, 10, 10, 10, 35]


def test_single_account_single_clause_carries_five_cues():
    p = SchemeParams(d=10, k1=2, k2=2, n=100, t=1)
    mapping = gen_mapping(p, 0)
    challenge = gen_password_challenge(p, 1)
    cov = cue_coverage(mapping, [(challenge, 0.25)])
    assert np.count_nonzero(cov.rates) == 5
    assert np.isclose(cov.rates.sum(), 5 * 0.25)
    # a cue in no account keeps rate zero
    untouched = np.flatnonzero(cov.rates == 0)
    assert len(untouched) == 95


def test_account_cue_count_bounded_with_collisions():
    mapping = gen_mapping(P, 2)
    rng = make_rng(3)
    sizes = []
    for _ in range(200):
        challenge = draw_account_challenge(P, rng, deal_variables=False)
        sizes.append(len(account_cue_set(mapping, challenge)))
    assert max(sizes) <= 50
    assert np.mean(sizes) < 47  # collisions keep the union below the cap


def test_expected_er_zero_rate_counts_every_window():
    s = RehearsalSchedule()
    rates = np.zeros(3)
    assert expected_extra_rehearsals(s, rates) == pytest.approx(3 * 8)


def test_expected_er_vanishes_at_high_rate():
    s = RehearsalSchedule()
    assert expected_extra_rehearsals(s, np.array([1e9])) == pytest.approx(0.0, abs=1e-12)


def test_expected_er_monotone_in_rates():
    s = RehearsalSchedule()
    rng = np.random.default_rng(4)
    rates = rng.uniform(0, 1, size=20)
    base = expected_extra_rehearsals(s, rates)
    for i in range(0, 20, 5):
        bumped = rates.copy()
        bumped[i] += 0.5
        assert expected_extra_rehearsals(s, bumped) <= base


def _small_coverage(seed):
    p = SchemeParams(d=10, k1=2, k2=2, n=16, t=2)
    mapping = gen_mapping(p, seed)
    rng = make_rng(seed + 1)
    lams = [1 / 2, 1 / 5, 1 / 9, 1 / 40]
    accounts = [(draw_account_challenge(p, rng), lam) for lam in lams]
    return cue_coverage(mapping, accounts)


def test_simulation_matches_closed_form():
    s = RehearsalSchedule()
    cov = _small_coverage(5)
    closed = expected_extra_rehearsals(s, cov)
    mean, (lo, hi) = simulate_extra_rehearsals(s, cov, 6, trials=30_000)
    assert abs(mean - closed) / closed < 0.05
    assert lo <= closed <= hi or abs(mean - closed) / closed < 0.02


def test_simulation_degenerate_zero_rates_exact():
    s = RehearsalSchedule()
    cov = CueCoverage(rates=np.zeros(4), account_cues=[set()], account_rates=[1.0])
    mean, (lo, hi) = simulate_extra_rehearsals(s, cov, 7, trials=100)
    assert mean == expected_extra_rehearsals(s, cov.rates) == 4 * 8
    assert lo == hi == mean


def test_ci_width_shrinks_like_sqrt_trials():
    s = RehearsalSchedule()
    cov = _small_coverage(8)
    _, (lo1, hi1) = simulate_extra_rehearsals(s, cov, 9, trials=2_000)
    _, (lo2, hi2) = simulate_extra_rehearsals(s, cov, 9, trials=8_000)
    ratio = (hi1 - lo1) / (hi2 - lo2)
    assert 1.5 < ratio < 2.7  # ideal is 2


def test_table_report_fields_and_monotonicity_in_n():
    profiles = build_profiles()
    means = []
    for n in (30, 50, 100):
        p = SchemeParams(d=10, k1=2, k2=2, n=n, t=10)
        report = table_report(p, profiles["infrequent"], draws=20, seed=10)
        assert report["profile"] == "infrequent"
        assert len(report["per_cue_histogram"]["counts"]) == 10
        means.append(report["mean"])
    assert means[0] <= means[1] <= means[2]


def test_profile_validation():
    with pytest.raises(ValueError):
        VisitationProfile(name="bad", buckets=((0.0, 3),))
    with pytest.raises(ValueError):
        VisitationProfile(name="bad", buckets=((0.5, -1),))
