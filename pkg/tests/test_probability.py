import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twostage.probability import (
    binom_cdf_lt,
    binom_pmf,
    binom_pmf_vector,
    binom_tail_ge,
    binom_tail_vector,
    nbinom_term,
)

from oracles import pmf as exact_pmf

P_GRID = [0.0, 1e-6, 0.01, 0.2, 0.37, 0.5, 0.8, 0.99, 1 - 1e-6, 1.0]
N_GRID = [0, 1, 2, 5, 17, 36, 100, 400]


def test_pmf_examples():
    assert binom_pmf(5, 0, 0.0) == 1.0
    assert binom_pmf(5, 2, 0.8) == pytest.approx(math.comb(5, 2) * 0.8**2 * 0.2**3, rel=1e-13)
    assert binom_pmf(5, 2, 0.8) == pytest.approx(0.0512, rel=1e-12)
    assert math.fsum(binom_pmf(5, k, 0.8) for k in range(6)) == pytest.approx(1.0, abs=1e-15)


def test_pmf_degenerate_rates_are_exact():
    assert binom_pmf(7, 7, 1.0) == 1.0
    assert binom_pmf(7, 6, 1.0) == 0.0
    assert binom_pmf(7, 1, 0.0) == 0.0
    assert list(binom_pmf_vector(3, 0.0)) == [1.0, 0.0, 0.0, 0.0]
    assert list(binom_pmf_vector(3, 1.0)) == [0.0, 0.0, 0.0, 1.0]


@pytest.mark.parametrize("args", [(5, 6, 0.5), (5, -1, 0.5), (5, 2, 1.5), (5, 2, -0.1), (-1, 0, 0.5)])
def test_pmf_domain_errors(args):
    with pytest.raises(ValueError):
        binom_pmf(*args)


def test_cdf_lt_examples():
    expected = sum(math.comb(5, k) * 0.8**k * 0.2 ** (5 - k) for k in range(3))
    assert binom_cdf_lt(5, 3, 0.8) == pytest.approx(expected, rel=1e-13)
    assert binom_cdf_lt(5, 3, 0.8) == pytest.approx(0.05792, abs=1e-12)
    assert binom_cdf_lt(5, 0, 0.8) == 0.0
    assert binom_cdf_lt(5, 6, 0.8) == 1.0


def test_cdf_lt_rejects_bad_arguments():
    with pytest.raises(ValueError):
        binom_cdf_lt(5, 7, 0.5)
    with pytest.raises(ValueError):
        binom_cdf_lt(5, 2, 1.2)


def test_tail_ge_examples():
    assert binom_tail_ge(36, 11, 0.2) == pytest.approx(0.0889, abs=5e-5)
    assert binom_tail_ge(36, 0, 0.2) == 1.0
    assert binom_tail_ge(36, -4, 0.2) == 1.0
    assert binom_tail_ge(36, 37, 0.2) == 0.0
    with pytest.raises(ValueError):
        binom_tail_ge(36, 3, -0.2)


def test_nbinom_examples():
    assert nbinom_term(3, 0, 0.8) == pytest.approx(0.8**3, rel=1e-14)
    assert nbinom_term(1, 0, 1.0) == 1.0
    assert nbinom_term(3, 1, 0.8) == pytest.approx(3 * 0.8**3 * 0.2, rel=1e-13)
    assert nbinom_term(2, 3, 0.0) == 0.0
    with pytest.raises(ValueError):
        nbinom_term(0, 1, 0.5)
    with pytest.raises(ValueError):
        nbinom_term(2, -1, 0.5)


@pytest.mark.parametrize("n", N_GRID)
@pytest.mark.parametrize("p", P_GRID)
def test_pmf_normalizes(n, p):
    assert abs(math.fsum(binom_pmf_vector(n, p)) - 1.0) <= 1e-12
    if n <= 36:
        assert abs(math.fsum(binom_pmf(n, k, p) for k in range(n + 1)) - 1.0) <= 1e-12


@pytest.mark.parametrize("n", N_GRID)
@pytest.mark.parametrize("p", P_GRID)
def test_lower_and_upper_tails_complement(n, p):
    for r in range(n + 2):
        assert abs(binom_cdf_lt(n, r, p) + binom_tail_ge(n, r, p) - 1.0) <= 1e-12


@pytest.mark.parametrize("n,r", [(5, 3), (36, 11), (12, 8), (1, 1), (100, 50)])
def test_cdf_lt_nonincreasing_in_p(n, r):
    values = [binom_cdf_lt(n, r, p) for p in np.linspace(0, 1, 101)]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("s", [1, 2, 5, 11])
@pytest.mark.parametrize("p", [0.05, 0.3, 0.8, 1.0])
def test_nbinom_sums_to_one(s, p):
    total, j, term = 0.0, 0, 1.0
    while True:
        term = nbinom_term(s, j, p)
        total += term
        # stop once the remaining tail is negligible
        if j > s / p and term < 1e-14:
            break
        j += 1
    assert abs(total - 1.0) < 1e-12


def test_tail_vector_matches_scalar():
    tail = binom_tail_vector(20, 0.3)
    for m in range(22):
        assert tail[m] == pytest.approx(binom_tail_ge(20, m, 0.3), abs=1e-14)


def test_large_n_stays_finite_and_accurate():
    from scipy.stats import binom

    n = 10_000
    for p in (0.001, 0.2, 0.5, 0.97):
        v = binom_pmf_vector(n, p)
        assert np.all(np.isfinite(v))
        assert abs(math.fsum(v) - 1.0) < 1e-10
        k = np.arange(n + 1)
        ref = binom.pmf(k, n, p)
        big = ref > 1e-300
        np.testing.assert_allclose(v[big], ref[big], rtol=1e-8)
    assert binom_tail_ge(n, 2100, 0.2) == pytest.approx(binom.sf(2099, n, 0.2), rel=1e-8)


@given(
    n=st.integers(0, 60),
    data=st.data(),
    p=st.floats(0, 1, allow_nan=False),
)
def test_pmf_matches_factorial_formula(n, data, p):
    k = data.draw(st.integers(0, n))
    assert binom_pmf(n, k, p) == pytest.approx(exact_pmf(n, k, p), rel=1e-9, abs=1e-300)
