import numpy as np
import pytest
from scipy import stats

from hcpw.params import SchemeParams
from hcpw.scheme import (
    Clause,
    PasswordChallenge,
    SecretMapping,
    draw_clause_array,
    eval_f,
    eval_values_batch,
    gen_clause,
    gen_mapping,
    gen_password_challenge,
    hamming,
    is_delta_balanced,
    is_eps_correlated,
    recalled_indices,
    respond,
    streaming_eval,
)

P22 = SchemeParams(d=10, k1=2, k2=2, n=14)


def test_params_validation():
    with pytest.raises(ValueError):
        SchemeParams(d=1, k1=1, k2=1, n=4)  # alphabet too small
    with pytest.raises(ValueError):
        SchemeParams(d=10, k1=11, k2=1, n=30)  # k1 > d
    with pytest.raises(ValueError):
        SchemeParams(d=10, k1=2, k2=2, n=13)  # n below clause width
    with pytest.raises(ValueError):
        SchemeParams(d=10, k1=2, k2=0, n=14)


def test_gen_mapping_deterministic_per_seed():
    p = SchemeParams(d=10, k1=1, k2=1, n=12, t=2)
    m1 = gen_mapping(p, 1234)
    m2 = gen_mapping(p, 1234)
    m3 = gen_mapping(p, 1235)
    assert np.array_equal(m1.digits, m2.digits)
    assert not np.array_equal(m1.digits, m3.digits)
    assert m1.digits.min() >= 0 and m1.digits.max() < 10


def test_gen_mapping_uniform_per_position():
    p = SchemeParams(d=10, k1=2, k2=2, n=14)
    draws = np.stack([gen_mapping(p, seed).digits for seed in range(100_000 // p.n)])
    # pool positions; also test one fixed position
    for counts in (np.bincount(draws.ravel(), minlength=10),
                   np.bincount(draws[:, 3], minlength=10)):
        assert stats.chisquare(counts).pvalue > 0.001


def test_eval_worked_example():
    # table slot 2 holds 7, index vars sum to 12 -> slot 2, tails 4 and 5
    values = [0, 0, 7, 0, 0, 0, 0, 0, 0, 0, 9, 3, 4, 5]
    assert eval_f(P22, values) == 6


def test_eval_zero_and_single_index():
    assert eval_f(P22, [0] * 14) == 0
    p = SchemeParams(d=10, k1=1, k2=1, n=12)
    values = [7, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8]  # index var 0 -> slot 0
    assert eval_f(p, values) == 5


def test_eval_input_errors():
    with pytest.raises(ValueError):
        eval_f(P22, [0] * 13)
    with pytest.raises(ValueError):
        eval_f(P22, [0] * 13 + [10])


def test_eval_batch_matches_scalar():
    rng = np.random.default_rng(0)
    vals = rng.integers(0, 10, size=(500, 14))
    batch = eval_values_batch(P22, vals)
    assert all(batch[i] == eval_f(P22, vals[i]) for i in range(len(vals)))


def test_eval_output_uniform_on_uniform_inputs():
    rng = np.random.default_rng(4)
    vals = rng.integers(0, 10, size=(1_000_000, 14))
    counts = np.bincount(eval_values_batch(P22, vals), minlength=10)
    expect = len(vals) / 10
    sd = np.sqrt(len(vals) * 0.1 * 0.9)
    assert np.all(np.abs(counts - expect) < 3 * sd)


@pytest.mark.parametrize("k1,k2,expected", [(2, 2, 9), (1, 3, 9), (1, 1, 5)])
def test_streaming_trace_length(k1, k2, expected):
    p = SchemeParams(d=10, k1=k1, k2=k2, n=10 + k1 + k2)
    rng = np.random.default_rng(2)
    values = rng.integers(0, 10, size=p.clause_width())
    result, trace = streaming_eval(p, values)
    assert len(trace) == expected == 2 * k1 + 2 * k2 + 1
    assert trace.max_slots_used <= 3
    assert result == eval_f(p, values)


def test_streaming_matches_eval_exhaustively_small():
    for d, k1, k2 in [(2, 1, 1), (2, 2, 2), (3, 1, 1)]:
        p = SchemeParams(d=d, k1=k1, k2=k2, n=d + k1 + k2)
        w = p.clause_width()
        grid = np.indices((d,) * w).reshape(w, -1).T
        for row in grid:
            result, _ = streaming_eval(p, row)
            assert result == eval_f(p, row)


def test_streaming_matches_eval_random_base10():
    rng = np.random.default_rng(3)
    for _ in range(300):
        values = rng.integers(0, 10, size=14)
        result, _ = streaming_eval(P22, values)
        assert result == eval_f(P22, values)


def test_recalled_indices_worked_example():
    clause = Clause(params=P22, indices=tuple(range(14)))
    digits = np.zeros(14, dtype=np.int64)
    digits[10], digits[11] = 9, 3  # index sum 12 -> slot 2
    mapping = SecretMapping(params=P22, digits=digits)
    assert recalled_indices(P22, mapping, clause) == {10, 11, 2, 12, 13}


def test_recalled_indices_simple_and_cardinality():
    p = SchemeParams(d=10, k1=1, k2=1, n=12)
    clause = Clause(params=p, indices=tuple(range(12)))
    mapping = SecretMapping(params=p, digits=np.zeros(12, dtype=np.int64))
    assert recalled_indices(p, mapping, clause) == {10, 0, 11}

    rng = np.random.default_rng(4)
    p2 = SchemeParams(d=10, k1=2, k2=2, n=30)
    mapping2 = gen_mapping(p2, 5)
    for _ in range(1000):
        c = gen_clause(p2, rng)
        assert len(recalled_indices(p2, mapping2, c)) == p2.k1 + p2.k2 + 1


def test_gen_clause_forced_support_and_distinctness():
    p = SchemeParams(d=10, k1=2, k2=2, n=14)
    clause = gen_clause(p, 6)
    assert sorted(clause.indices) == list(range(14))

    p2 = SchemeParams(d=10, k1=2, k2=2, n=40)
    rows = draw_clause_array(p2, 100_000, 7)
    assert rows.shape == (100_000, 14)
    sorted_rows = np.sort(rows, axis=1)
    assert np.all(sorted_rows[:, 1:] != sorted_rows[:, :-1])


def test_gen_clause_per_position_marginals_uniform():
    p = SchemeParams(d=10, k1=2, k2=2, n=20)
    rows = draw_clause_array(p, 100_000, 8)
    for pos in (0, 7, 13):
        counts = np.bincount(rows[:, pos], minlength=20)
        assert stats.chisquare(counts).pvalue > 0.001


def test_gen_clause_rejects_small_n():
    with pytest.raises(ValueError):
        SchemeParams(d=10, k1=2, k2=2, n=13)


def test_respond_reduces_to_eval_and_zero_mapping():
    p = SchemeParams(d=10, k1=2, k2=2, n=14, t=1)
    mapping = gen_mapping(p, 9)
    challenge = gen_password_challenge(p, 10)
    digits = respond(mapping, challenge)
    assert len(digits) == 1
    assert int(digits) == eval_f(p, mapping.digits[list(challenge.clauses[0].indices)])

    zero = SecretMapping(params=p, digits=np.zeros(14, dtype=np.int64))
    assert respond(zero, challenge) == "0"


def test_respond_against_independent_reimplementation():
    p = SchemeParams(d=10, k1=2, k2=2, n=30, t=10)
    mapping = gen_mapping(p, 11)
    challenge = gen_password_challenge(p, 12)

    # direct transcription of the definition, kept separate from eval_f
    out = []
    for clause in challenge.clauses:
        vals = [int(mapping.digits[i]) for i in clause.indices]
        j = (vals[10] + vals[11]) % 10
        out.append(str((vals[j] + vals[12] + vals[13]) % 10))
    assert respond(mapping, challenge) == "".join(out)


def test_respond_rejects_mismatched_mapping():
    p_small = SchemeParams(d=10, k1=2, k2=2, n=14)
    p_big = SchemeParams(d=10, k1=2, k2=2, n=20)
    mapping = gen_mapping(p_small, 0)
    challenge = gen_password_challenge(p_big, 0)
    with pytest.raises(ValueError):
        respond(mapping, challenge)


def test_hamming_and_correlation():
    p = SchemeParams(d=10, k1=2, k2=2, n=14)
    m1 = gen_mapping(p, 13)
    assert hamming(m1, m1) == 0
    assert is_eps_correlated(m1, m1, 0.9)

    p10 = SchemeParams(d=10, k1=1, k2=1, n=12)
    base = gen_mapping(p10, 14)
    shifted = SecretMapping(params=p10, digits=(base.digits + 1) % 10)
    assert hamming(base, shifted) == 12
    assert not is_eps_correlated(base, shifted, 0.05)


def test_random_mapping_usually_balanced():
    p = SchemeParams(d=10, k1=2, k2=2, n=1000)
    hits = sum(is_delta_balanced(gen_mapping(p, seed), 0.05) for seed in range(200))
    assert hits >= 198


def test_mapping_file_roundtrip(tmp_path):
    p = SchemeParams(d=10, k1=2, k2=2, n=25)
    mapping = gen_mapping(p, 99)
    path = tmp_path / "m.hcps"
    mapping.save(path)
    loaded = SecretMapping.load(path, params=p)
    assert loaded == mapping
    raw = path.read_text()
    assert '"version":1' in raw and '"digits"' in raw


def test_password_challenge_length_invariant():
    p = SchemeParams(d=10, k1=2, k2=2, n=14, t=3)
    c = gen_clause(p, 1)
    with pytest.raises(ValueError):
        PasswordChallenge(params=p, clauses=(c,))
