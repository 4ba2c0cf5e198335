"""Permutation statistics: closed forms for bit reversal, enumeration for anything.

Closed forms that involve ``sqrt(k)`` are written with ``s = 2**(n/2)``
for even ``n`` and ``t = 2**((n-1)/2)`` (that is ``sqrt(k/2)``) for odd
``n``, so everything stays in exact integers and fractions.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._validation import check_int, check_power_of_two
from .perms import BitReversal, Circular, Permutation
from .sawsums import C_rec

MAX_PAIR_ENUM = 1 << 12


def _half_powers(n):
    if n % 2 == 0:
        return 1 << (n // 2), None
    return None, 1 << ((n - 1) // 2)


# --------------------------------------------------------------------------
# descents


class DescentStats(NamedTuple):
    cyclic_descents: int
    cyclic_major: int
    linear_descents: int
    linear_major: int


def descent_stats(k):
    """Descents and major index of ``pi_n``, cyclic and linear conventions."""
    check_power_of_two(k, min_bits=1)
    return DescentStats(k // 2, k * k // 4, k // 2 - 1, k * k // 4 - (k - 1))


def descents_enum(perm: Permutation, cyclic=True):
    """``(#DES, maj)`` by direct scan; cyclic wraps position ``k-1`` onto 0."""
    t = perm.table()
    nxt = np.roll(t, -1)
    pos = np.flatnonzero(t > nxt)
    if not cyclic:
        pos = pos[pos < perm.k - 1]
    return int(pos.size), int(pos.sum())


def max_descent_run(perm: Permutation, cyclic=True):
    """Longest run of consecutive descent positions."""
    t = perm.table()
    d = t > np.roll(t, -1)
    if not cyclic:
        d = d[:-1]
    best = cur = 0
    for x in d.tolist():
        cur = cur + 1 if x else 0
        best = max(best, cur)
    return best


# --------------------------------------------------------------------------
# fixed points, excedances, descedances


class FixedPointStats(NamedTuple):
    count: int
    F1: int
    F2: int


def fixed_point_stats(k):
    n = check_power_of_two(k)
    count = 1 << ((n + 1) // 2)
    s, t = _half_powers(n)
    if s is not None:
        F1 = Fraction(s * (k - 1), 2)
        F2 = Fraction(k * k * s, 3) + Fraction(k * s * (n - 4), 8) + Fraction(s, 6)
    else:
        F1 = Fraction(t * (k - 1))
        F2 = Fraction(2 * k * k * t, 3) + Fraction(k * t * (n - 5), 4) + Fraction(t, 3)
    return FixedPointStats(count, _as_int(F1), _as_int(F2))


class ExcedanceStats(NamedTuple):
    count: int
    E1: int
    E2: int
    D1: int  # sum of descedance positions
    D2: int  # sum of their squares


def excedance_stats(k):
    n = check_power_of_two(k)
    count = (k - (1 << ((n + 1) // 2))) // 2
    s, t = _half_powers(n)
    F = Fraction
    if s is not None:
        E1 = F(k * k, 6) - F(k, 6) - F(s * (k - 1), 4) + F(k * n, 16)
        D1 = F(k * k, 3) - F(k, 3) - F(s * (k - 1), 4) - F(k * n, 16)
        E2 = (F(k**3, 12) - F(k * k * s, 6) + F(k * k * (3 * n - 4), 48)
              - F(k * s * (n - 4), 16) - F(k * n, 16) - F(s, 12))
        D2 = (F(k**3, 4) - F(k * k * s, 6) - F(k * k * (3 * n + 20), 48)
              - F(k * s * (n - 4), 16) + F(k * (3 * n + 8), 48) - F(s, 12))
    else:
        E1 = F(k * k, 6) - F(k, 12) - F(t * (k - 1), 2) + F(k * (n - 1), 16)
        D1 = F(k * k, 3) - F(5 * k, 12) - F(t * (k - 1), 2) - F(k * (n - 1), 16)
        E2 = (F(k**3, 12) - F(k * k * t, 3) + F(k * k * (n - 1), 16)
              - F(k * t * (n - 5), 8) - F(k * (3 * n + 1), 48) - F(t, 6))
        # derived from sum j**2 = E2 + F2 + D2; see the decisions ledger
        D2 = (F(k**3, 4) - F(k * k * t, 3) - F(k * k * (n + 7), 16)
              - F(k * t * (n - 5), 8) + F(k * (n + 3), 16) - F(t, 6))
    return ExcedanceStats(count, *(_as_int(x) for x in (E1, E2, D1, D2)))


def excedance_floor_sum(k):
    """``-sum_j floor((j - pi(j))/k)`` by scan; equals the excedance count."""
    n = check_power_of_two(k, max_bits=24)
    t = BitReversal(n).table()
    j = np.arange(k, dtype=np.int64)
    return int(-np.floor_divide(j - t, k).sum())


def point_stats_enum(perm: Permutation):
    """Fixed points, excedances, descedances by scan, as a dict."""
    t = perm.table().astype(object) if perm.k > (1 << 20) else perm.table()
    j = np.arange(perm.k, dtype=np.int64)
    fp = j[t == j]
    ex = j[t > j]
    de = j[t < j]
    sq = lambda a: int(sum(int(x) * int(x) for x in a.tolist()))  # noqa: E731
    return {
        "fp_count": int(fp.size), "F1": int(fp.sum()), "F2": sq(fp),
        "exc_count": int(ex.size), "E1": int(ex.sum()), "E2": sq(ex),
        "des_count": int(de.size), "D1": int(de.sum()), "D2": sq(de),
    }


# --------------------------------------------------------------------------
# inversions


def inversions_brp(k):
    n = check_power_of_two(k)
    return (k * k - (n + 1) * k) // 4


def inversions_enum(perm: Permutation):
    if perm.k > MAX_PAIR_ENUM:
        raise ValueError(f"pair enumeration capped at k={MAX_PAIR_ENUM}")
    t = perm.table()
    return int(sum(int(np.count_nonzero(t[i + 1:] < t[i])) for i in range(perm.k)))


def inversions(perm_or_k):
    """Inversion count; ``int`` arguments mean the bit reversal of that length."""
    if isinstance(perm_or_k, int):
        return inversions_brp(perm_or_k)
    if isinstance(perm_or_k, BitReversal):
        return inversions_brp(perm_or_k.k)
    if isinstance(perm_or_k, Circular):
        return perm_or_k.c * (perm_or_k.k - perm_or_k.c)
    return inversions_enum(perm_or_k)


# --------------------------------------------------------------------------
# spread


def spread_enum(perm: Permutation, alpha):
    """``min |pi(i) - pi(j)| + |i - j|`` over ``0 < |i - j| < alpha``."""
    alpha = check_int(alpha, "alpha")
    if alpha < 2:
        raise ValueError("alpha must be >= 2")
    t = perm.table()
    best = None
    for d in range(1, min(alpha, perm.k)):
        v = int(np.abs(t[d:] - t[:-d]).min()) + d
        best = v if best is None else min(best, v)
    return best


def spread_min(perm, alpha):
    """Minimum spread; closed form for bit reversal with ``k >= 8``."""
    if isinstance(perm, BitReversal) and perm.k >= 8:
        alpha = check_int(alpha, "alpha")
        if alpha < 2:
            raise ValueError("alpha must be >= 2")
        k = perm.k
        if alpha == 2:
            return k // 4 + 1
        if alpha == 3:
            return k // 8 + 2
        return min(6, k // 8 + 2)
    return spread_enum(perm, alpha)


# --------------------------------------------------------------------------
# serial correlation


class Correlation(NamedTuple):
    covariance: Fraction
    variance: Fraction
    theta: Fraction

    @property
    def theta_float(self):
        return float(self.theta)


def variance(k):
    return Fraction(k * k - 1, 12)


def covariance_brp(k, p):
    check_power_of_two(k, min_bits=1)
    if not 1 <= p < k:
        raise ValueError("lag p must satisfy 1 <= p < k")
    v = (p & -p).bit_length() - 1
    return Fraction(C_rec(k, p), k) + Fraction(1, 4) + Fraction(k, 2) * (1 - Fraction(3, 2 ** (v + 1)))


def serial_correlation(k, p):
    """Exact lag-``p`` covariance, variance and correlation of ``pi_n``."""
    cov = covariance_brp(k, p)
    var = variance(k)
    return Correlation(cov, var, cov / var)


def theta1_closed(k):
    return Fraction(-(5 * k * k + 5 * k + 12), 7 * k * (k + 1))


def covariance_enum(perm: Permutation, p):
    k = perm.k
    t = perm.table().astype(object)
    nxt = np.roll(t, -p)
    # k^2 cov = k sum x y - (sum x)^2 with sum x = k(k-1)/2
    sxy = int((t * nxt).sum())
    return Fraction(sxy, k) - Fraction(k - 1, 2) ** 2


# --------------------------------------------------------------------------
# report


@dataclass
class StatsReport:
    k: int
    numDescents: int
    numAscents: int
    majorIndex: int
    numFixedPoints: int
    sumFixedPoints: int
    sumSqFixedPoints: int
    numExcedances: int
    sumExcedances: int
    sumSqExcedances: int
    sumDescedances: int
    sumSqDescedances: int
    numInversions: int
    minSpread: dict = field(default_factory=dict)
    variance: str = ""
    covariance: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)
    source: str = "closed"

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def csv_rows(self):
        """``(k, statistic, value)`` triples, nested maps flattened."""
        rows = []
        for key, val in self.to_dict().items():
            if key in ("k", "source"):
                continue
            if isinstance(val, dict):
                for sub, v in val.items():
                    rows.append((self.k, f"{key}[{sub}]", v))
            else:
                rows.append((self.k, key, val))
        return rows


def brp_report(k, lags=(1,), spreads=(2, 3, 4)):
    """Closed-form report for ``pi_n``."""
    d = descent_stats(k)
    fp = fixed_point_stats(k)
    ex = excedance_stats(k)
    cors = {p: serial_correlation(k, p) for p in lags if 1 <= p < k}
    return StatsReport(
        k=k, numDescents=d.cyclic_descents, numAscents=k - d.cyclic_descents,
        majorIndex=d.cyclic_major, numFixedPoints=fp.count, sumFixedPoints=fp.F1,
        sumSqFixedPoints=fp.F2, numExcedances=ex.count, sumExcedances=ex.E1,
        sumSqExcedances=ex.E2, sumDescedances=ex.D1, sumSqDescedances=ex.D2,
        numInversions=inversions_brp(k),
        minSpread={a: spread_min(BitReversal(check_power_of_two(k)), a) for a in spreads} if k >= 2 else {},
        variance=str(variance(k)),
        covariance={p: str(c.covariance) for p, c in cors.items()},
        theta={p: str(c.theta) for p, c in cors.items()},
        source="closed",
    )


def enum_report(perm: Permutation, lags=(1,), spreads=(2, 3, 4)):
    """Report by enumeration, for any permutation with ``k <= 2**12``."""
    k = perm.k
    if k > MAX_PAIR_ENUM:
        raise ValueError(f"enumeration report capped at k={MAX_PAIR_ENUM}")
    nd, maj = descents_enum(perm, cyclic=True)
    pt = point_stats_enum(perm)
    var = variance(k)
    covs = {p: covariance_enum(perm, p) for p in lags if 1 <= p < k}
    return StatsReport(
        k=k, numDescents=nd, numAscents=k - nd, majorIndex=maj,
        numFixedPoints=pt["fp_count"], sumFixedPoints=pt["F1"], sumSqFixedPoints=pt["F2"],
        numExcedances=pt["exc_count"], sumExcedances=pt["E1"], sumSqExcedances=pt["E2"],
        sumDescedances=pt["D1"], sumSqDescedances=pt["D2"],
        numInversions=inversions_enum(perm),
        minSpread={a: spread_enum(perm, a) for a in spreads} if k >= 2 else {},
        variance=str(var),
        covariance={p: str(c) for p, c in covs.items()},
        theta={p: str(c / var) if var else "nan" for p, c in covs.items()},
        source="enumeration",
    )


def _as_int(x):
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise ArithmeticError(f"closed form produced non-integer {x}")
        return x.numerator
    return x
