import random

import numpy as np
import pytest

from prunedperm.banking import (
    MODES, BankLayout, ContentionError, bank_of, brp_window_identity, contention_check, gap_table,
    random_cf_perm, schedule_pruned,
)
from prunedperm.perms import BitReversal, Table
from prunedperm.pruning import spbri


def naive_cf(perm, layout):
    for j in range(layout.W):
        banks = [bank_of(perm(j + t * layout.W), layout) for t in range(layout.M)]
        if len(set(banks)) != layout.M:
            return False
    return True


def test_bank_of_modes():
    lsb, msb = BankLayout(4, 8, "lsb"), BankLayout(4, 8, "msb")
    assert [bank_of(i, lsb) for i in range(10)] == [i % 8 for i in range(10)]
    assert [bank_of(i, msb) for i in range(10)] == [i // 4 for i in range(10)]


def test_layout_validation():
    with pytest.raises(ValueError):
        BankLayout(3, 8)
    with pytest.raises(ValueError):
        BankLayout(4, 8, "mid")


def test_contention_check_agrees_with_naive():
    rng = random.Random(1)
    for _ in range(100):
        w, m = rng.randint(0, 3), rng.randint(0, 3)
        layout = BankLayout(1 << w, 1 << m, rng.choice(MODES))
        p = Table.random(layout.k, rng.randrange(1000))
        ok, wit = contention_check(p, layout)
        assert ok == naive_cf(p, layout)
        if not ok:
            j, t, v = wit
            assert bank_of(p(j + t * layout.W), layout) == bank_of(p(j + v * layout.W), layout)


@pytest.mark.parametrize("n", range(1, 12))
def test_brp_lsb_contention_free(n):
    for m in range(n):
        layout = BankLayout(1 << (n - m), 1 << m)
        assert contention_check(BitReversal(n), layout)[0]
        assert brp_window_identity(n, n - m)


def test_gap_table_matches_scan():
    p = BitReversal(6)
    for beta in (1, 20, 33, 63, 64):
        gt = gap_table(p, beta, 8, 8)
        t = p.table()
        for row in range(8):
            for j in range(8):
                i = j + row * 8
                assert gt.at(j, row) == int(np.count_nonzero(t[: i + 1] >= beta))


def test_schedule_emits_serial_order():
    p = BitReversal(6)
    layout = BankLayout(8, 8)
    for beta in (10, 40, 64):
        s = schedule_pruned(p, beta, layout)
        em = sorted(s.emitted())
        assert [x for x, _ in em] == list(range(beta))
        assert [y for _, y in em] == spbri(p, 0, beta - 1, beta, 0)[0].tolist()
        assert s.totalStalls == 64 - beta


def test_schedule_filler_mode():
    s = schedule_pruned(32, 22, BankLayout(4, 8), filler=True)
    assert s.totalStalls == 0
    assert sum(1 for a in s.accesses if a.action == "fill") == 10


def test_schedule_raises_on_contention():
    with pytest.raises(ContentionError) as ei:
        schedule_pruned(32, 22, BankLayout(4, 8, "msb"))
    j, t, v = ei.value.witness
    assert t != v


def test_random_cf_generator():
    for seed in range(50):
        rng = random.Random(seed)
        W, M = 1 << rng.randint(0, 4), 1 << rng.randint(0, 4)
        mode = rng.choice(MODES)
        p = random_cf_perm(W, M, mode, seed)
        assert naive_cf(p, BankLayout(W, M, mode))


def test_csv_trace():
    text = schedule_pruned(16, 12, BankLayout(4, 4)).to_csv()
    lines = text.splitlines()
    assert lines[0] == "step,bank,action,linear,permuted"
    assert sum(1 for x in lines if ",write," in x) == 12
