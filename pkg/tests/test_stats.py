import json
from fractions import Fraction

import pytest

from prunedperm.perms import BitReversal, Circular, Table
from prunedperm.stats import (
    brp_report, covariance_enum, descent_stats, descents_enum, enum_report, excedance_floor_sum,
    excedance_stats, fixed_point_stats, inversions, inversions_enum, point_stats_enum,
    serial_correlation, spread_enum, spread_min, theta1_closed,
)


def naive_points(t):
    fp = [i for i, v in enumerate(t) if v == i]
    ex = [i for i, v in enumerate(t) if v > i]
    de = [i for i, v in enumerate(t) if v < i]
    return fp, ex, de


@pytest.mark.parametrize("n", range(1, 11))
def test_closed_forms_equal_enumeration(n):
    k = 1 << n
    p = BitReversal(n)
    t = p.table().tolist()

    d = descent_stats(k)
    cyc = [i for i in range(k) if t[i] > t[(i + 1) % k]]
    lin = [i for i in range(k - 1) if t[i] > t[i + 1]]
    assert (d.cyclic_descents, d.cyclic_major) == (len(cyc), sum(cyc))
    assert (d.linear_descents, d.linear_major) == (len(lin), sum(lin))
    assert descents_enum(p) == (len(cyc), sum(cyc))

    fp, ex, de = naive_points(t)
    f = fixed_point_stats(k)
    assert (f.count, f.F1, f.F2) == (len(fp), sum(fp), sum(i * i for i in fp))
    e = excedance_stats(k)
    assert (e.count, e.E1, e.E2) == (len(ex), sum(ex), sum(i * i for i in ex))
    assert (e.D1, e.D2) == (sum(de), sum(i * i for i in de))
    assert excedance_floor_sum(k) == len(ex)

    if k <= 1024:
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if t[i] > t[j])
        assert inversions(k) == inv == inversions_enum(p)


def test_point_enum_helper():
    t = Table((3, 1, 7, 2, 5, 8, 6, 4, 0, 9))
    fp, ex, de = naive_points(t.values)
    got = point_stats_enum(t)
    assert got["fp_count"] == len(fp) and got["E1"] == sum(ex) and got["D2"] == sum(i * i for i in de)


def test_circular_inversions_closed():
    for k in (8, 16, 64):
        for c in range(k):
            assert inversions(Circular(k, c)) == inversions_enum(Circular(k, c)) == c * (k - c)


@pytest.mark.parametrize("n", range(3, 11))
def test_spread_closed_forms(n):
    p = BitReversal(n)
    t = p.table().tolist()
    for a in (2, 3, 4, 5, 8):
        naive = min(abs(t[i] - t[j]) + (j - i) for i in range(p.k) for j in range(i + 1, min(p.k, i + a)))
        assert spread_min(p, a) == naive == spread_enum(p, a)


@pytest.mark.parametrize("n", range(1, 9))
def test_covariance_equals_enumeration(n):
    k = 1 << n
    p = BitReversal(n)
    t = p.table().tolist()
    mean = Fraction(k - 1, 2)
    for lag in range(1, k):
        naive = sum((Fraction(t[j]) - mean) * (t[(j + lag) % k] - mean) for j in range(k)) / k
        c = serial_correlation(k, lag)
        assert c.covariance == naive == covariance_enum(p, lag)
        assert c.theta == naive / c.variance


def test_theta1_closed_and_limit():
    for n in range(2, 12):
        k = 1 << n
        assert serial_correlation(k, 1).theta == theta1_closed(k)
    assert abs(float(theta1_closed(1 << 20)) + 5 / 7) < 1e-3


def test_reports_agree():
    for n in range(1, 9):
        k = 1 << n
        a = brp_report(k, lags=range(1, min(k, 6))).to_dict()
        b = enum_report(BitReversal(n), lags=range(1, min(k, 6))).to_dict()
        a.pop("source"), b.pop("source")
        assert a == b


def test_report_serialisation():
    r = brp_report(16, lags=(1, 2))
    back = json.loads(r.to_json())
    assert back["numInversions"] == inversions_enum(BitReversal(4))
    rows = r.csv_rows()
    assert ("theta[1]" in {x[1] for x in rows}) and all(x[0] == 16 for x in rows)


def test_enum_report_cap():
    with pytest.raises(ValueError):
        enum_report(BitReversal(13))
