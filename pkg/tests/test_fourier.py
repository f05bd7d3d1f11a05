import itertools

import numpy as np
import pytest

from hcpw import fourier
from hcpw.params import SchemeParams
from hcpw.scheme import batch_evaluator


def family(d, k1, k2):
    return batch_evaluator(SchemeParams(d=d, k1=k1, k2=k2, n=d + k1 + k2))


def test_parity_coefficient():
    xor = lambda xs: xs.sum(axis=1) % 2
    coeff = fourier.fourier_coeff_bruteforce(xor, d=2, k=2, alpha=(1, 1), j=0)
    assert coeff == pytest.approx(1.0 + 0j, abs=1e-12)


def test_constant_function_coefficients():
    const = lambda xs: np.zeros(len(xs), dtype=np.int64)
    assert fourier.fourier_coeff_bruteforce(const, 2, 3, (0, 0, 0), 0) == pytest.approx(1.0)
    assert fourier.fourier_coeff_bruteforce(const, 2, 3, (1, 0, 1), 0) == pytest.approx(0.0, abs=1e-12)


def test_family_weight_one_coefficients_vanish():
    f = family(3, 1, 1)
    for j in range(3):
        table = fourier.coefficient_table(f, 3, 5, j)
        weights = fourier.hamming_weights(3, 5)
        assert np.all(np.abs(table[weights == 1]) < 1e-9)


def test_conjugate_symmetry_random_function():
    rng = np.random.default_rng(0)
    lut = rng.integers(0, 3, size=3**4)
    f = lambda xs: lut[np.ravel_multi_index(xs.T, (3,) * 4)]
    for alpha in [(1, 0, 2, 0), (2, 1, 0, 1)]:
        neg = tuple((-a) % 3 for a in alpha)
        c1 = fourier.fourier_coeff_bruteforce(f, 3, 4, alpha, 1)
        c2 = fourier.fourier_coeff_bruteforce(f, 3, 4, neg, 1)
        assert c1 == pytest.approx(np.conj(c2), abs=1e-12)


def test_table_matches_direct_sum():
    rng = np.random.default_rng(1)
    lut = rng.integers(0, 2, size=2**5)
    f = lambda xs: lut[np.ravel_multi_index(xs.T, (2,) * 5)]
    table = fourier.coefficient_table(f, 2, 5, 1)
    for alpha in itertools.product(range(2), repeat=5):
        assert table[alpha] == pytest.approx(
            fourier.fourier_coeff_bruteforce(f, 2, 5, alpha, 1), abs=1e-12)


def test_zeroth_coefficient_is_shifted_probability():
    f = family(3, 1, 1)
    xs = fourier.enumerate_inputs(3, 5)
    out = f(xs)
    for j in range(3):
        expect = 2 * np.mean(out == j) - 1
        got = fourier.fourier_coeff_bruteforce(f, 3, 5, (0,) * 5, j)
        assert got == pytest.approx(expect, abs=1e-12)


def test_parseval():
    f = family(2, 2, 1)
    for j in range(2):
        assert fourier.parseval_defect(f, 2, 5, j) < 1e-9


@pytest.mark.parametrize("d,k1,k2", [(3, 1, 1), (2, 1, 1)])
def test_distributional_r_family(d, k1, k2):
    f = family(d, k1, k2)
    res = fourier.distributional_r(f, d, d + k1 + k2)
    assert res.value == k2 + 1
    assert not res.is_lower_bound
    assert abs(res.witness_coeff) > 1e-9


def test_distributional_r_pure_linear_form():
    # sum of all inputs mod d: only full-support characters survive
    d, k = 3, 4
    f = lambda xs: xs.sum(axis=1) % d
    res = fourier.distributional_r(f, d, k)
    assert res.value == k


def test_distributional_r_lower_bound_via_weight_cap():
    d, k = 3, 4
    f = lambda xs: xs.sum(axis=1) % d
    res = fourier.distributional_r(f, d, k, max_weight=2)
    assert res.is_lower_bound and res.value == 2


def test_linearity_g_family_and_linear():
    res = fourier.linearity_g(family(3, 1, 1), 3, 5)
    assert res.value == 1 and not res.probable

    lin = lambda xs: (xs @ np.array([1, 2, 1])) % 3
    res = fourier.linearity_g(lin, 3, 3)
    assert res.value == 0
    assert res.witness.verified_exhaustively


def test_linearity_g_two_index_vars():
    f = family(2, 2, 1)
    res = fourier.linearity_g(f, 2, 5)
    assert res.value == 2
    assert res.witness.verified_exhaustively
    # the witness restriction really is affine: re-check every input
    w = res.witness
    free = [p for p in range(5) if p not in w.fixed_positions]
    xs = fourier.enumerate_inputs(2, len(free))
    pts = np.zeros((len(xs), 5), dtype=np.int64)
    for pos, val in zip(w.fixed_positions, w.fixed_values):
        pts[:, pos] = val
    pts[:, free] = xs
    expect = (w.constant + xs @ np.array(w.coefficients)) % w.modulus
    assert np.array_equal(f(pts) % w.modulus, expect)


def test_budget_guard():
    f = family(3, 1, 1)
    with pytest.raises(fourier.BudgetExceeded):
        fourier.fourier_coeff_bruteforce(f, 3, 5, (0,) * 5, 0, budget=10)


def test_exact_zero_check_agrees_with_numeric():
    f = family(3, 1, 1)
    # weight-1 characters vanish exactly; the witness does not
    assert fourier.fourier_coeff_is_zero_exact(f, 3, 5, (1, 0, 0, 0, 0), 0)
    assert fourier.fourier_coeff_is_zero_exact(f, 3, 5, (0, 0, 2, 0, 0), 2)
    witness = (1, 0, 0, 0, 1)  # slot 0 and the tail variable
    assert not fourier.fourier_coeff_is_zero_exact(f, 3, 5, witness, 0)
