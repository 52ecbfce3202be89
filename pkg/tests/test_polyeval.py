import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mobius_orbits.polyeval import (
    IntPolynomial,
    PolynomialOverflowError,
    eval_exact,
    eval_exact_array,
    eval_wrapped,
    eval_wrapped_array,
    nonneg_on_range,
    stream_evaluator,
)

SQUARE = IntPolynomial([0, 0, 1])

coeff_lists = st.lists(st.integers(-(10**3), 10**3), min_size=1, max_size=7)


def test_degree_and_normalisation():
    assert IntPolynomial([1, 2, 0, 0]).coeffs == (1, 2)
    assert IntPolynomial([0, 0]).degree == 0
    assert IntPolynomial([]).is_zero
    assert IntPolynomial([5, 0, 3]).degree == 2


def test_parse():
    assert IntPolynomial.parse("0,0,1") == SQUARE
    assert IntPolynomial.parse(" 5, -1 ").coeffs == (5, -1)
    for bad in ("", "1,,2", "1.5", "x"):
        with pytest.raises(ValueError):
            IntPolynomial.parse(bad)


@pytest.mark.parametrize("coeffs,n,expected", [([0, 0, 1], 3, 9), ([0, 1], 0, 0), ([5, 1, 0, 2], 10, 2015)])
def test_eval_exact_examples(coeffs, n, expected):
    assert eval_exact(IntPolynomial(coeffs), n) == expected


def test_eval_exact_overflow():
    with pytest.raises(PolynomialOverflowError):
        eval_exact(IntPolynomial([0] * 5 + [1]), 2**30)


def test_eval_wrapped_examples():
    assert eval_wrapped(SQUARE, 3) == 9
    assert eval_wrapped(SQUARE, 2**32) == 0
    # 128-bit oracle reduced mod 2^64
    assert eval_wrapped(IntPolynomial([0, 0, 0, 1]), 10**7) == (10**21) % 2**64


@given(coeff_lists, st.integers(0, 2**40))
@settings(max_examples=300)
def test_wrapped_commutes_with_reduction(coeffs, n):
    p = IntPolynomial(coeffs)
    try:
        exact = eval_exact(p, n)
    except PolynomialOverflowError:
        return
    assert eval_wrapped(p, n) == exact % 2**64


@given(coeff_lists, st.lists(st.integers(0, 2**63), min_size=1, max_size=20))
@settings(max_examples=100)
def test_wrapped_array_matches_scalar(coeffs, ns):
    p = IntPolynomial(coeffs)
    out = eval_wrapped_array(p, np.array(ns, dtype=np.uint64))
    assert out.tolist() == [eval_wrapped(p, n) for n in ns]


@given(coeff_lists, st.integers(1, 10**6))
@settings(max_examples=100)
def test_exact_array_matches_scalar(coeffs, n_hi):
    p = IntPolynomial(coeffs)
    ns = np.array([1, n_hi // 2 + 1, n_hi], dtype=np.int64)
    assert [int(v) for v in eval_exact_array(p, ns)] == [eval_exact(p, int(n)) for n in ns]


def test_exact_array_big_values_fall_back_to_python_ints():
    p = IntPolynomial([0, 0, 0, 1])
    out = eval_exact_array(p, np.array([10**7]))
    assert out.dtype == object and out[0] == 10**21


def test_stream_examples():
    assert list(itertools.islice(stream_evaluator(SQUARE, 0), 5)) == [0, 1, 4, 9, 16]
    assert list(itertools.islice(stream_evaluator(IntPolynomial([7]), 5), 4)) == [7, 7, 7, 7]
    p = IntPolynomial([0, -1, 0, 1])
    got = list(itertools.islice(stream_evaluator(p, 10**6), 1000))
    assert got == [eval_wrapped(p, 10**6 + k) for k in range(1000)]


def test_stream_depth_equals_degree():
    assert stream_evaluator(IntPolynomial([7]), 0).depth == 0
    assert stream_evaluator(IntPolynomial([1, 2, 3, 4]), 0).depth == 3


def test_stream_long_random_runs():
    rng = random.Random(3)
    for _ in range(3):
        p = IntPolynomial([rng.randint(-1000, 1000) for _ in range(rng.randint(1, 7))])
        start = rng.randint(0, 2**64 - 1)
        got = np.fromiter(itertools.islice(stream_evaluator(p, start), 10**5), dtype=np.uint64, count=10**5)
        ns = (np.arange(10**5, dtype=np.uint64) + np.uint64(start))
        assert np.array_equal(got, eval_wrapped_array(p, ns))


def test_stream_wraps_across_2_64():
    p = IntPolynomial([3, 1, 1])
    got = list(itertools.islice(stream_evaluator(p, 2**64 - 3), 6))
    assert got == [eval_wrapped(p, (2**64 - 3 + k) % 2**64) for k in range(6)]


@pytest.mark.parametrize("coeffs,N,expected", [([0, 0, 1], 10**6, True), ([-5, 1], 10, False), ([2, -3, 1], 100, True)])
def test_nonneg_examples(coeffs, N, expected):
    assert nonneg_on_range(IntPolynomial(coeffs), N) is expected


def test_nonneg_detects_interior_dip():
    # (n-50)(n-51) - 1 is -1 at n = 50, 51 only
    p = IntPolynomial([50 * 51 - 1, -101, 1])
    assert not nonneg_on_range(p, 100)
    assert nonneg_on_range(p, 49)
