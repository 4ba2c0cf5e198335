import random
from fractions import Fraction

import numpy as np
import pytest

from prunedperm._validation import ArithmeticOverflow, checked
from prunedperm.perms import brp_table
from prunedperm.sawsums import (
    C_rec, J_closed, J_rec, Q_closed, R_closed, S_rec, T_batch, T_extremes, T_extremes_exhaustive,
    T_rec, U_closed, V_rec, W_rec, floor_sq_sum, saw, saw_exact, scale_of, sum_oracle,
)


def sawtooth(x):
    # ((x)) from its textbook definition
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(0)
    return x - (x.numerator // x.denominator) - Fraction(1, 2)


def test_saw_primitives_against_definition():
    for k in (1, 2, 8, 16):
        for m in range(-40, 40):
            assert saw(m, k) == 2 * k * sawtooth(Fraction(m, k))
            assert saw_exact(Fraction(m, k)) == sawtooth(Fraction(m, k))


def test_oracle_matches_fraction_definition():
    # the integer oracle against a plain Fraction sum, small k
    k, n = 16, 4
    pi = brp_table(n).tolist()
    for b, c in [(0, 0), (3, 5), (15, 1)]:
        direct = sum(sawtooth(Fraction(j - b, k)) * sawtooth(Fraction(pi[j] - c, k)) for j in range(k))
        assert sum_oracle("S", k, b=b, c=c) == direct * scale_of("S", k)
        direct = sum(sawtooth(Fraction(pi[j] - b, k)) * sawtooth(Fraction(pi[(j + 1) % k] - c, k)) for j in range(k))
        assert sum_oracle("V", k, a=b, b=c) == direct * scale_of("V", k)


@pytest.mark.parametrize("n", range(1, 6))
def test_recursions_exhaustive_small(n):
    k = 1 << n
    for x in range(k):
        for y in range(k):
            assert S_rec(k, x, y) == sum_oracle("S", k, b=x, c=y)
            assert T_rec(k, x, y) == sum_oracle("T", k, b=x, c=y)
            assert V_rec(k, x, y) == sum_oracle("V", k, a=x, b=y)
            assert W_rec(k, x, y) == sum_oracle("W", k, a=x, b=y)
        assert C_rec(k, x) == sum_oracle("C", k, p=x)


def test_recursions_sampled_mid():
    rng = random.Random(11)
    for n in (7, 9):
        k = 1 << n
        for _ in range(60):
            x, y = rng.randrange(k), rng.randrange(k)
            assert T_rec(k, x, y) == sum_oracle("T", k, b=x, c=y)
            assert W_rec(k, x, y) == sum_oracle("W", k, a=x, b=y)


def test_shift_out_of_range_rejected():
    with pytest.raises(ValueError):
        T_rec(64, 64 + 5, 9)
    with pytest.raises(ValueError):
        S_rec(64, 5, -1)


def test_T_batch_equals_scalar():
    k = 64
    b, c = np.meshgrid(np.arange(k), np.arange(k))
    got = T_batch(k, b, c)
    want = np.array([[T_rec(k, int(x), int(y)) for x in range(k)] for y in range(k)])
    assert (got == want).all()


@pytest.mark.parametrize("n", range(0, 12))
def test_closed_forms(n):
    k = 1 << n
    assert R_closed(k) == sum_oracle("R", k)
    assert Q_closed(k) == sum_oracle("Q", k)
    assert floor_sq_sum(k) == sum_oracle("QF", k)
    for m in (0, 1, 2):
        assert J_closed(k, m) == sum_oracle("J", k, m=m)
    for m in range(0, 7):
        assert J_rec(k, m) == sum_oracle("J", k, m=m)
    if n <= 8:
        assert U_closed(k) == sum_oracle("U", k)


@pytest.mark.parametrize("n", range(2, 9))
def test_T_extremes(n):
    k = 1 << n
    assert T_extremes(k) == T_extremes_exhaustive(k)


def test_large_k_stays_exact():
    k = 1 << 32
    assert W_rec(k, 2**16 - 1, 2**16 + 1) == k - k * k


def test_checked_overflow():
    with pytest.raises(ArithmeticOverflow):
        checked(1 << 127)
    assert checked(-(1 << 127)) == -(1 << 127)


def test_bad_k_rejected():
    with pytest.raises(ValueError):
        T_rec(12, 1, 1)
