"""Property tests over randomly generated inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hcpw.modlinear import solve_matrix_mod
from hcpw.params import SchemeParams
from hcpw.scheme import eval_f, hamming, streaming_eval


@st.composite
def scheme_inputs(draw):
    d = draw(st.integers(min_value=2, max_value=8))
    k1 = draw(st.integers(min_value=1, max_value=min(3, d)))
    k2 = draw(st.integers(min_value=1, max_value=3))
    params = SchemeParams(d=d, k1=k1, k2=k2, n=d + k1 + k2)
    values = draw(st.lists(st.integers(min_value=0, max_value=d - 1),
                           min_size=params.clause_width(),
                           max_size=params.clause_width()))
    return params, values


@given(scheme_inputs())
@settings(max_examples=200, deadline=None)
def test_streaming_always_matches_direct_evaluation(case):
    params, values = case
    result, trace = streaming_eval(params, values)
    assert result == eval_f(params, values)
    assert len(trace) == 2 * params.k1 + 2 * params.k2 + 1
    assert trace.max_slots_used <= 3


@given(st.lists(st.integers(0, 9), min_size=1, max_size=30),
       st.lists(st.integers(0, 9), min_size=1, max_size=30))
@settings(max_examples=100, deadline=None)
def test_hamming_is_a_metric(a, b):
    size = min(len(a), len(b))
    x, y = np.array(a[:size]), np.array(b[:size])
    assert hamming(x, x) == 0
    assert hamming(x, y) == hamming(y, x)
    assert 0 <= hamming(x, y) <= size


@given(st.integers(min_value=0, max_value=10**6), st.integers(2, 12),
       st.integers(1, 4), st.integers(0, 5))
@settings(max_examples=150, deadline=None)
def test_solver_solutions_satisfy_their_systems(seed, d, n, m):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, d, size=(m, n))
    b = rng.integers(0, d, size=m)
    res = solve_matrix_mod(a, b, d)
    if res.status != "inconsistent":
        assert np.all((a @ res.solution) % d == b % d)
