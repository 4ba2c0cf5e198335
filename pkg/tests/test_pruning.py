import random
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from prunedperm._ops import counting
from prunedperm.inliers import inl_brute
from prunedperm.perms import LCS, QPP, BitReversal, Block2D, Table
from prunedperm.pruning import (
    SerialInconsistency, convergence_check, gap, gap_bounds, iteration_bound, minimal_inliers,
    ppbri, pruned_spread, serial_gap, serial_prefix_gap, spbri, spbri_fast, spread_lower_bound,
    spread_lower_bound_literal,
)


def naive_pruned(perm, beta):
    return [perm(j) for j in range(perm.k) if perm(j) < beta]


def naive_gap(perm, x, beta):
    # smallest d with exactly x inliers among the first x + d positions
    d = 0
    while sum(1 for j in range(x + d) if perm(j) < beta) < x:
        d += 1
    return d


def test_spbri_is_serial_pruning():
    for perm in (BitReversal(5), Table.random(32, 9), LCS(32, 11)):
        for beta in (1, 7, 22, 32):
            out, _ = spbri(perm, 0, beta - 1, beta, 0)
            assert out.tolist() == naive_pruned(perm, beta)
            assert np.array_equal(spbri_fast(perm, 0, beta - 1, beta, 0)[0], out)


def test_spbri_final_gap_matches_scan():
    p = BitReversal(5)
    # the gap carried at pruned index x is the prefix gap of x + 1 outputs
    _, d = spbri(p, 0, 21, 22, 0)
    assert d == naive_gap(p, 22, 22)


def test_spbri_window_with_seed():
    p = BitReversal(6)
    beta = 40
    full = naive_pruned(p, beta)
    for w1 in (0, 5, 17, 39):
        d = naive_gap(p, w1, beta)
        out, _ = spbri(p, w1, beta - 1, beta, d)
        assert out.tolist() == full[w1:]


def test_spbri_wrong_seed_detected():
    with pytest.raises(SerialInconsistency):
        spbri(BitReversal(5), 5, 21, 22, 20)


def test_gap_matches_scan_random():
    rng = random.Random(0)
    for n in range(2, 11):
        k = 1 << n
        p = BitReversal(n)
        for _ in range(40):
            b = rng.randint(1, k)
            a = rng.randint(0, b)
            want = serial_prefix_gap(k, a, b)
            assert gap(k, a, b) == want == gap(p, a, b, backend=inl_brute)
            if a < b:
                assert serial_gap(k, a, b) == naive_gap(p, a + 1, b)


def test_gap_other_mothers():
    rng = random.Random(3)
    for perm in (Table.random(64, 2), LCS(64, 21), Block2D(BitReversal(3), Table.random(8, 1))):
        for _ in range(30):
            b = rng.randint(1, 64)
            a = rng.randint(0, b)
            assert gap(perm, a, b) == naive_gap(perm, a, b)


def test_trace_properties():
    tr = minimal_inliers(1 << 16, 3000, 40000)
    it = tr.iterates
    assert it == sorted(it) and it[-1] == it[-2] == tr.finalGap
    assert it[0] == 3000 - inl_brute(BitReversal(16), 3000, 40000)
    d = tr.to_dict()
    assert d["finalGap"] == tr.finalGap and d["iterations"] == it.index(tr.finalGap) + 1


def test_mi_alpha_gt_beta():
    with pytest.raises(ValueError):
        minimal_inliers(64, 10, 5)


def test_mi_trivial_edges():
    assert gap(64, 0, 30) == 0
    assert gap(64, 30, 64) == 0


@pytest.mark.parametrize("n", [4, 7, 10])
def test_ppbri_equals_spbri(n):
    k = 1 << n
    for beta in (k // 2 + 1, 3 * k // 4, k - 1, k):
        ref = spbri(k, 0, beta - 1, beta, 0)[0]
        for p in (1, 2, 3, 8, 16):
            if p > beta:
                continue
            assert np.array_equal(ppbri(k, p, beta), ref)
            assert np.array_equal(ppbri(k, p, beta, fast=True), ref)


def test_ppbri_executor_deterministic():
    ref = ppbri(1 << 10, 8, 700)
    with ThreadPoolExecutor(4) as ex:
        assert np.array_equal(ppbri(1 << 10, 8, 700, executor=ex), ref)


def test_ppbri_remainder_window():
    res = ppbri(32, 4, 22, details=True)
    assert res.windows[-1] == (20, 21)
    assert res.seeds == [naive_gap(BitReversal(5), w1, 22) for w1, _ in res.windows]


def test_ppbri_rejects():
    with pytest.raises(ValueError):
        ppbri(32, 0, 22)
    with pytest.raises(ValueError):
        ppbri(32, 23, 22)


def test_gap_bounds_hold():
    rng = random.Random(5)
    for n in range(2, 11):
        k = 1 << n
        for _ in range(40):
            b = rng.randint(1, k)
            a = rng.randint(0, b)
            gb = gap_bounds(k, a)
            assert gb.lower(b) <= gap(k, a, b) <= gb.upper(b)


def test_iteration_bound():
    rng = random.Random(6)
    for n in range(4, 15):
        k = 1 << n
        for _ in range(10):
            b = rng.randint(1, k)
            a = rng.randint(0, b)
            tr = minimal_inliers(k, a, b)
            assert tr.iterations <= iteration_bound(k, b)


def test_convergence_edge():
    tr = minimal_inliers(512, 200, 512)
    assert convergence_check(tr, 512, 512).mu == 0.0


def test_spread_bound_formulas():
    # closed collapse is the floor of the literal power form
    for g in range(0, 128, 5):
        lit = spread_lower_bound_literal(64, 0.076, g, 2048)
        assert spread_lower_bound(64, 0.076, g, 2048) == int(lit + 1e-9)
    with pytest.raises(ValueError):
        spread_lower_bound(64, 0.9, 300, 2048)


def test_pruned_spread_no_pruning_equals_smin():
    q = QPP(256, 15, 32)
    t = q.table().tolist()
    smin = min(abs(t[i] - t[j]) + j - i for i in range(256) for j in range(i + 1, 256))
    assert pruned_spread(q, 256) == smin


def test_mi_op_count_small_for_brp():
    with counting() as ops:
        minimal_inliers(1 << 30, 1 << 20, 3 << 28)
    assert ops.total < 5000
