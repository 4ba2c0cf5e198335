"""Randomised properties checked against brute-force oracles."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from prunedperm.banking import BankLayout, contention_check, random_cf_perm, schedule_pruned
from prunedperm.inliers import BruteIndex, inl, inl_brp, inl_brute, sinl_brp, sinl_brute
from prunedperm.perms import BitReversal, Block2D, MStream, Table, describe, parse_perm
from prunedperm.pruning import gap, minimal_inliers, ppbri, serial_prefix_gap, spbri_fast
from prunedperm.sawsums import T_rec, W_rec, sum_oracle


@st.composite
def brp_query(draw, lo=1, hi=16):
    n = draw(st.integers(lo, hi))
    k = 1 << n
    return n, draw(st.integers(0, k)), draw(st.integers(0, k))


@st.composite
def small_table(draw, max_bits=5):
    n = draw(st.integers(0, max_bits))
    return Table.random(1 << n, draw(st.integers(0, 10**6)))


@settings(max_examples=300, deadline=None)
@given(brp_query())
def test_inl_vs_brute(q):
    n, a, b = q
    assert inl_brp(1 << n, a, b) == inl_brute(BitReversal(n), a, b)


@settings(max_examples=200, deadline=None)
@given(brp_query(hi=12))
def test_sinl_vs_brute(q):
    n, a, b = q
    assert sinl_brp(1 << n, a, b) == sinl_brute(BitReversal(n), a, b)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 9), st.data())
def test_sums_vs_oracle(n, data):
    k = 1 << n
    x, y = data.draw(st.integers(0, k - 1)), data.draw(st.integers(0, k - 1))
    assert T_rec(k, x, y) == sum_oracle("T", k, b=x, c=y)
    assert W_rec(k, x, y) == sum_oracle("W", k, a=x, b=y)


@settings(max_examples=200, deadline=None)
@given(brp_query(hi=14), st.data())
def test_mi_equals_scan(q, data):
    n, _, b = q
    k = 1 << n
    b = max(b, 1)
    a = data.draw(st.integers(0, b))
    tr = minimal_inliers(k, a, b)
    assert tr.finalGap == serial_prefix_gap(k, a, b)
    assert tr.iterates == sorted(tr.iterates)
    assert tr.finalGap >= a - inl_brp(k, a, b)


@settings(max_examples=100, deadline=None)
@given(small_table(), small_table(), st.data())
def test_block2d_counts(s1, s2, data):
    p = Block2D(s1, s2)
    a, b = data.draw(st.integers(0, p.k)), data.draw(st.integers(0, p.k))
    assert inl(p, a, b) == inl_brute(p, a, b)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 4), st.integers(1, 4), st.integers(0, 999), st.data())
def test_mstream_counts(n, m, seed, data):
    sig = tuple(Table.random(1 << n, seed + i) for i in range(m))
    omega = tuple(data.draw(st.permutations(range(m))))
    p = MStream(sig, omega)
    a, b = data.draw(st.integers(0, p.k)), data.draw(st.integers(0, p.k))
    assert inl(p, a, b) == inl_brute(p, a, b)


@settings(max_examples=100, deadline=None)
@given(small_table(6), st.data())
def test_gap_any_mother(p, data):
    b = data.draw(st.integers(1, p.k))
    a = data.draw(st.integers(0, b))
    assert gap(p, a, b) == serial_prefix_gap(p, a, b)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.data())
def test_ppbri_equals_serial(n, data):
    k = 1 << n
    b = data.draw(st.integers(1, k))
    p = data.draw(st.integers(1, min(b, 64)))
    ref = spbri_fast(k, 0, b - 1, b, 0)[0]
    assert np.array_equal(ppbri(k, p, b, fast=True), ref)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.sampled_from(["lsb", "msb"]), st.integers(0, 10**6), st.data())
def test_cf_schedule_equals_serial(w, m, mode, seed, data):
    layout = BankLayout(1 << w, 1 << m, mode)
    perm = random_cf_perm(layout.W, layout.M, mode, seed)
    assert contention_check(perm, layout)[0]
    b = data.draw(st.integers(1, perm.k))
    em = sorted(schedule_pruned(perm, b, layout).emitted())
    assert [x for x, _ in em] == list(range(b))
    assert [y for _, y in em] == spbri_fast(perm, 0, b - 1, b, 0)[0].tolist()


@settings(max_examples=60, deadline=None)
@given(st.integers(12, 18), st.data())
def test_brute_index(n, data):
    p = BitReversal(n)
    idx = BruteIndex(p)
    a, b = data.draw(st.integers(0, p.k)), data.draw(st.integers(0, p.k))
    assert idx.count(a, b) == inl_brute(p, a, b) == inl_brp(p.k, a, b)


@settings(max_examples=60, deadline=None)
@given(small_table(4))
def test_descriptor_table_roundtrip(p):
    assert parse_perm(describe(p)).table().tolist() == p.table().tolist()
