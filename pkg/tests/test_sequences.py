from fractions import Fraction
from itertools import accumulate

import pytest
from hypothesis import given, strategies as st

from tmprod.sequences import (ConstantOne, WeightFamily, ZeroOneTM, block_pattern, digits, epsilon,
                              partial_weight_sum, parse_weight, weight_eval, zero_one_t)

EPS = WeightFamily.epsilon()


def test_epsilon_prefix():
    assert [epsilon(n) for n in range(8)] == [1, -1, -1, 1, -1, 1, 1, -1]
    assert epsilon(11) == -1


def test_epsilon_recursion_up_to_2_20():
    for n in range(2 ** 20):
        e = epsilon(n)
        assert epsilon(2 * n) == e and epsilon(2 * n + 1) == -e


def test_family_matches_epsilon_and_t_up_to_2_20():
    for n in range(0, 2 ** 20, 7):
        e = epsilon(n)
        assert weight_eval(EPS, n) == e
        assert zero_one_t(n) == (1 - e) // 2


@pytest.mark.parametrize("n,t", [(0, 0), (1, 1), (6, 0), (7, 1)])
def test_zero_one_t(n, t):
    assert zero_one_t(n) == t


def test_base_three_example():
    assert weight_eval(WeightFamily.ones_base(3), 5) == -1


def test_geometric_example():
    assert weight_eval(WeightFamily.geometric(Fraction(-3, 2)), 3) == Fraction(9, 4)


@pytest.mark.parametrize("B", range(2, 11))
def test_ones_base_matches_digit_count(B):
    fam = WeightFamily.ones_base(B)
    for n in range(0, 10 ** 5 + 1):
        assert weight_eval(fam, n) == (-1) ** digits(n, B).count(1)


def test_epsilon_partial_sums_are_bounded():
    running = [0] + list(accumulate(epsilon(n) for n in range(2 ** 16)))
    for N in range(2 ** 16 + 1):
        s = partial_weight_sum(EPS, N)
        assert s == running[N]
        # pairs (2k, 2k+1) cancel, so only a trailing even index survives
        assert s == (0 if N % 2 == 0 else epsilon(N - 1))


def test_partial_sum_examples():
    assert partial_weight_sum(EPS, 4) == 0
    fam = WeightFamily.ones_base(3)
    assert partial_weight_sum(fam, 9) == sum(weight_eval(fam, n) for n in range(9))


@given(st.integers(2, 6), st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=5, max_size=5),
       st.integers(0, 3000))
def test_partial_sum_matches_direct_sum(B, mus, N):
    fam = WeightFamily(B, (1, *mus[:B - 1]))
    assert partial_weight_sum(fam, N) == sum(weight_eval(fam, n) for n in range(N))


@given(st.integers(0, 10 ** 12))
def test_recursion_holds_for_large_n(n):
    fam = WeightFamily.ones_base(5)
    for j in range(5):
        if 5 * n + j:
            assert weight_eval(fam, 5 * n + j) == fam.multipliers[j] * weight_eval(fam, n)


def test_block_pattern_is_in_block_weight():
    pat = block_pattern(EPS, 4)
    assert list(pat) == [epsilon(j) for j in range(16)]


def test_mu0_must_be_one():
    with pytest.raises(ValueError):
        WeightFamily(2, (2, -1))


def test_mean_zero():
    assert EPS.mean_zero
    assert not WeightFamily.ones_base(3).mean_zero


@pytest.mark.parametrize("text", ["epsilon", "ones_base:3", "zero_one_tm", "geometric:-3/2", "one"])
def test_parse_weight_roundtrip(text):
    w = parse_weight(text)
    assert w.label == text
    assert parse_weight(w.label) == w


def test_marker_weights():
    assert [ZeroOneTM()(n) for n in range(4)] == [0, 1, 1, 0]
    assert ConstantOne()(12345) == 1


def test_parse_weight_rejects_unknown():
    with pytest.raises(ValueError):
        parse_weight("fibonacci")
