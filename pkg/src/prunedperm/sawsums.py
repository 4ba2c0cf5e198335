"""Saw-tooth and floor summations over the bit-reversal permutation.

Every fast routine returns a plain ``int`` at the natural scale of its sum
(``4k`` for R, S, T; ``k**2`` for C, V, W; see :data:`SCALES`).  All
arithmetic is integer-only.  Results are checked against the signed 128-bit
range and :class:`~prunedperm._validation.ArithmeticOverflow` is raised
instead of wrapping.

The definitional sums live in :func:`sum_oracle`, which works in exact
rationals and is deliberately naive.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, floor, isqrt
from typing import NamedTuple

import numpy as np

from ._ops import tick
from ._validation import (
    InexactDivision,
    bit_count,
    check_index,
    check_int,
    check_power_of_two,
    checked,
    exact_div,
)
from .perms import _brp, brp_table

SCALES = {"R": "4k", "S": "4k", "T": "4k", "C": "k^2", "V": "k^2", "W": "k^2", "U": "8", "Q": "2", "J": "1"}


class ScaledSum(NamedTuple):
    """An exact sum stored as ``value / scale``."""

    value: int
    scale: int

    def exact(self):
        return Fraction(self.value, self.scale)

    def descale(self):
        """Integer value; raises if the division is not exact."""
        return exact_div(self.value, self.scale, "descale")


def scale_of(kind, k):
    tag = SCALES[kind]
    if tag == "4k":
        return 4 * k
    if tag == "k^2":
        return k * k
    return int(tag)


# --------------------------------------------------------------------------
# primitives


def saw(num, den):
    """``2*den*((num/den))`` as an integer.

    ``((x)) = x - floor(x) - 1/2 + delta(x)/2`` with ``delta(x) = 1`` for
    integer ``x``; floor rounds toward minus infinity.
    """
    den = check_int(den, "den")
    if den <= 0:
        raise ValueError("den must be positive")
    r = num % den
    if r == 0:
        return 0
    return 2 * r - den


def saw_exact(x):
    """Unscaled saw of a rational, for oracles."""
    x = Fraction(x)
    fl = floor(x)
    if x == fl:
        return Fraction(0)
    return x - fl - Fraction(1, 2)


def floor_prod_sum(k, p, q):
    """``sum_{j<k} floor((j-p)/k) * floor((j-q)/k)`` in closed form."""
    k = check_int(k, "k")
    if k < 1:
        raise ValueError("k must be >= 1")
    fp, rp = divmod(p, k)
    fq, rq = divmod(q, k)
    return min(rp, rq) + fp * fq * k + fp * rq + fq * rp


# --------------------------------------------------------------------------
# J_m(k) = sum_j j**m pi(j)


def J_closed(k, m):
    n = check_power_of_two(k)
    if m == 0:
        return k * (k - 1) // 2
    if m == 1:
        return checked(exact_div(2 * k**3 + (n - 4) * k * k + 2 * k, 8, "J1"))
    if m == 2:
        return checked(exact_div(8 * k**4 - (20 - 6 * n) * k**3 + 2 * (8 - 3 * n) * k * k - 4 * k, 48, "J2"))
    raise ValueError("closed forms exist for m in {0, 1, 2}; use J_rec")


@lru_cache(maxsize=None)
def bernoulli_plus(m):
    """Bernoulli numbers with ``B_1 = +1/2``."""
    bs = [Fraction(1)]
    for i in range(1, m + 1):
        bs.append(1 - sum(comb(i, j) * bs[j] / (i - j + 1) for j in range(i)))
    return tuple(bs)


def power_sum(N, p):
    """``sum_{j=1}^{N} j**p`` via Faulhaber (``B_1 = +1/2``), as a Fraction."""
    if N <= 0:
        return Fraction(0)
    bs = bernoulli_plus(p)
    total = sum(comb(p + 1, s) * bs[s] * Fraction(N) ** (p + 1 - s) for s in range(p + 1))
    return total / (p + 1)


def J_rec(k, m):
    """``J_m`` through the halving recurrence, exact for any ``0 <= m <= 8``."""
    n = check_power_of_two(k)
    if not 0 <= m <= 8:
        raise ValueError("J_rec is limited to m <= 8")
    # table[r] holds J_r at the current size, built bottom-up from k = 1
    table = [0] * (m + 1)
    h = 1
    for _ in range(n):
        new = []
        for mm in range(m + 1):
            tot = 2 * table[mm] + h**mm
            for r in range(mm + 1):
                tot += comb(mm, r) * h**r * (2 * table[mm - r] + power_sum(h - 1, mm - r))
            new.append(tot)
        table = new
        h *= 2
    out = table[m]
    if isinstance(out, Fraction):
        if out.denominator != 1:
            raise InexactDivision(f"J_rec produced {out}")
        out = out.numerator
    return checked(out)


# --------------------------------------------------------------------------
# R, U, Q closed forms


def R_closed(k):
    """``4k sum_j ((j/k)) ((pi(j)/k))``."""
    n = check_power_of_two(k)
    return checked(k * n // 2 - k + 1)


def U_closed(k):
    """``8 U(k)`` with ``U(k) = k(n-2)/8 + 1/4``."""
    n = check_power_of_two(k)
    return checked(k * (n - 2) + 2)


def Q_closed(k):
    """``2 sum_j ((j**2/k))``."""
    n = check_power_of_two(k)
    if n == 0:
        return 0
    if n % 2 == 0:
        return -2 * (1 << (n // 2)) + 3
    return -3 * (1 << ((n - 1) // 2)) + 3


def floor_sq_sum(k):
    """``sum_j floor(j**2 / k)`` in closed form."""
    n = check_power_of_two(k)
    if n == 0:
        return 0
    if n % 2 == 0:
        root_term = 9 * (1 << (n // 2))  # 6 * (3/2) sqrt(k)
    else:
        root_term = 6 * (1 << ((n + 1) // 2))
    return exact_div(2 * k * k - 6 * k + root_term - 8, 6, "floor_sq_sum")


# --------------------------------------------------------------------------
# S and T


def _K_S(k, b):
    b %= k
    return -2 * b + k // 2 - 1 if b < k // 2 else 2 * b - 3 * k // 2 + 1


def S_rec(k, b, c):
    """``4k sum_j (((j-b)/k)) (((pi(j)-c)/k))``."""
    n = check_power_of_two(k)
    check_index(b, k, "b")
    check_index(c, k, "c")
    total, scale = 0, 1
    while k > 2:
        m = n - 1
        cs = _brp(m, c >> 1)
        if c & 1:
            term = saw(cs - b, k) + _K_S(k, b)
        else:
            # 2k ((x + 1/2)) with x = (cs-b)/k
            term = -exact_div(saw(2 * (cs - b) + k, 2 * k), 2, "S") + _K_S(k, b)
        total += scale * term
        scale *= 2
        k, n, c = k >> 1, m, c >> 1
        tick(steps=1)
    return checked(total)


def _T_term(k, m, b, c):
    cs = _brp(m, c >> 1)
    if c & 1:
        return -4 * b - k * (
            2 * ((cs - b) // k) - 2 * ((2 * b) // k)
            - ((cs - b) % k == 0) + (cs % k == 0) + ((2 * b) % k == 0)
        )
    x = 2 * (cs - b) + k
    y = 2 * b + k
    kk = 2 * k
    return k * (2 * (x // kk) + 2 * (y // kk) - (x % kk == 0) - (y % kk == 0))


def T_rec(k, b, c):
    """``4k sum_j ( ((j-b)/k)) - ((j/k)) ) ( ((pi(j)-c)/k)) - ((pi(j)/k)) )``.

    At most ``n - 1`` halvings; zero when ``b`` or ``c`` vanishes.
    """
    n = check_power_of_two(k)
    check_index(b, k, "b")
    check_index(c, k, "c")
    total, scale = 0, 1
    while k > 2:
        b %= k
        if b == 0 or c == 0:
            break
        total += scale * _T_term(k, n - 1, b, c)
        scale *= 2
        k, n, c = k >> 1, n - 1, c >> 1
        tick(steps=1)
    return checked(total)


@lru_cache(maxsize=32)
def _cached_table(n):
    t = brp_table(n)
    t.setflags(write=False)
    return t


def _brp_vec(n, x):
    if n <= 20:
        return _cached_table(n)[x]
    out = np.zeros_like(x)
    for i in range(n):
        out = (out << 1) | ((x >> i) & 1)
    return out


MAX_BATCH_BITS = 30


def T_batch(k, b, c):
    """Vectorised :func:`T_rec` over int arrays ``b`` and ``c`` (``k <= 2**30``)."""
    n = check_power_of_two(k, max_bits=MAX_BATCH_BITS)
    b = np.asarray(b, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    b, c = np.broadcast_arrays(b, c)
    if b.size and (b.min() < 0 or b.max() >= k or c.min() < 0 or c.max() >= k):
        raise ValueError("b and c must lie in [0, k)")
    b = b.copy()
    c = c.copy()
    total = np.zeros(b.shape, dtype=np.int64)
    scale = 1
    while k > 2:
        b %= k
        live = (b != 0) & (c != 0)
        if not live.any():
            break
        cs = _brp_vec(n - 1, c >> 1)
        odd = (c & 1) == 1
        d = cs - b
        t_odd = -4 * b - k * (
            2 * np.floor_divide(d, k) - 2 * ((2 * b) // k)
            - (d % k == 0) + (cs == 0) + (2 * b == k)
        )
        x = 2 * d + k
        y = 2 * b + k
        kk = 2 * k
        t_even = k * (2 * np.floor_divide(x, kk) + 2 * (y // kk) - (x % kk == 0) - (y % kk == 0))
        total += np.where(live, scale * np.where(odd, t_odd, t_even), 0)
        # dead lanes keep dying: zeroing c pins them at T = 0 thereafter
        c = np.where(live, c >> 1, 0)
        scale *= 2
        k >>= 1
        n -= 1
    return total


# --------------------------------------------------------------------------
# C, V, W


def C_rec(k, p):
    """``k**2 sum_j ((pi(j)/k)) ((pi(j+p)/k))`` with ``j + p`` taken mod k."""
    n = check_power_of_two(k)
    check_index(p, k, "p")
    if p == 0:
        return exact_div(k * (k - 1) * (k - 2), 12, "C")
    if 2 * p == k:
        return exact_div(k * (k - 2) * (k - 4), 12, "C")
    v = (p & -p).bit_length() - 1
    u = 1 << v
    acc, kp = 0, k
    for j in range(n - v - 1):
        acc += 8**j * max(p, kp - p)
        kp //= 2
        p %= kp
        tick(steps=1)
    tail = exact_div(k * k * ((2 * k - 12) * u * u + 18 * u - 5 * k), 24 * u * u, "C tail")
    return checked(acc + tail)


def _split_ab(k, a, b):
    n = bit_count(k)
    h = k >> 1
    m = n - 1
    ea, eb = a & 1, b & 1
    ap, bp = a - ea, b - eb
    A = 2 * _brp(m, (_brp(m, ap >> 1) + 1) % h)
    B = 2 * _brp(m, (_brp(m, bp >> 1) - 1) % h)
    return h, ea, eb, ap, bp, A, B


def V_rec(k, a, b):
    """``k**2 sum_j (((pi(j)-a)/k)) (((pi(j+1)-b)/k))``, cyclic successor."""
    check_power_of_two(k)
    check_index(a, k, "a")
    check_index(b, k, "b")
    return checked(_V(k, a, b))


def _V(k, a, b):
    if k <= 2:
        return 0
    tick(steps=1)
    h, ea, eb, ap, bp, A, B = _split_ab(k, a, b)
    app = A - bp if ea == 0 else -A + bp
    bpp = B - ap if eb == 0 else -B + ap
    e = 1 if ea == eb else 0
    prod = (saw(a + 1, k) - saw(a + 2, k)) * (saw(b, k) - saw(b - 1, k))
    out = 8 * _V(h, ap >> 1, bp >> 1)
    out += exact_div(prod, 4, "V product")
    out -= (k // 4) * (saw(app, k) + saw(bpp, k))
    if e:
        out += (k * k // 4) * (bpp % k == 0) - k // 2
    return out


def W_rec(k, a, b):
    """``k**2 sum_j [((pi(j)-a)/k)) - ((pi(j)/k))] [((pi(j+1)-b)/k)) - ((pi(j+1)/k))]``."""
    check_power_of_two(k)
    check_index(a, k, "a")
    check_index(b, k, "b")
    return checked(_W(k, a, b))


def _W(k, a, b):
    if k <= 2:
        return 0
    tick(steps=1)
    h, ea, eb, ap, bp, app, bpp = _split_ab(k, a, b)
    e = 1 if ea == eb else 0
    q = k // 4
    out = 8 * _W(h, ap >> 1, bp >> 1)
    out += (2 * eb - 1) * q * (saw(bpp - ap, k) - saw(bpp, k))
    out += (2 * ea - 1) * q * (saw(app - bp, k) - saw(app, k))
    out += q * saw(h - bp, k)
    delta = lambda x: 1 if x % k == 0 else 0  # noqa: E731
    out += (k * k // 4) * (
        -(1 - eb) * delta(h - bp)
        + e * delta(app - bp)
        - delta(ap + 2) * (delta(bp) - 1 - ea)
    )
    out -= ap * k // 2 + ea * eb * k
    return out


# --------------------------------------------------------------------------
# extremes of T


def T_extremes(k):
    """Closed-form ``(min, max)`` of :func:`T_rec` over all shifts (4k scale)."""
    n = check_power_of_two(k)
    if n < 2:
        return 0, 0
    if n % 2 == 0:
        tmin = -3 * k - 4 + 8 * isqrt(k)
        tmax = exact_div((12 * n - 11) * k - 16, 9, "Tmax")
    else:
        tmin = -3 * k - 4 + 6 * (1 << ((n + 1) // 2))
        tmax = exact_div((12 * n - 11) * k + 16, 9, "Tmax")
    return tmin, tmax


def T_extremes_exhaustive(k):
    """Brute ``(min, max)`` of :func:`T_batch` over every ``(b, c)``; ``k <= 2**12``."""
    check_power_of_two(k, max_bits=12)
    lo, hi = None, None
    cs = np.arange(k, dtype=np.int64)
    for b in range(k):
        row = T_batch(k, np.full(k, b, dtype=np.int64), cs)
        rlo, rhi = int(row.min()), int(row.max())
        lo = rlo if lo is None else min(lo, rlo)
        hi = rhi if hi is None else max(hi, rhi)
    return lo, hi


# --------------------------------------------------------------------------
# definitional oracles

ORACLE_MAX_BITS = 14


def _saw_vec(m, k):
    r = np.mod(m, k)
    return np.where(r == 0, 0, 2 * r - k)


def sum_oracle(kind, k, **params):
    """Direct exact summation of a definitional sum, at the fast routine's scale.

    ``kind`` is one of R, S, T, C, V, W, J, U, Q, QF (the floor sum of
    ``j**2/k``).  Parameters: ``b, c`` for S and T, ``p`` for C, ``a, b``
    for V and W, ``m`` for J.

    Every saw-tooth value is held as the integer ``2k((m/k))``, so a
    product of two saws is an integer over ``4k**2`` and the whole sum is
    accumulated exactly in int64 (``|sum| < k * 4k**2 <= 2**44``).
    """
    n = check_power_of_two(k, max_bits=ORACLE_MAX_BITS)
    kind = kind.upper()
    pi = brp_table(n).astype(np.int64)
    j = np.arange(k, dtype=np.int64)
    F = Fraction
    sv = _saw_vec

    def prod(x, y):  # sum of ((x/k)) ((y/k)) as a Fraction
        return F(int((x * y).sum()), 4 * k * k)

    if kind == "R":
        s = prod(sv(j, k), sv(pi, k))
    elif kind == "S":
        b, c = params["b"], params["c"]
        s = prod(sv(j - b, k), sv(pi - c, k))
    elif kind == "T":
        b, c = params["b"], params["c"]
        s = prod(sv(j - b, k) - sv(j, k), sv(pi - c, k) - sv(pi, k))
    elif kind == "C":
        p = params["p"]
        s = prod(sv(pi, k), sv(np.roll(pi, -p), k))
    elif kind == "V":
        a, b = params["a"], params["b"]
        s = prod(sv(pi - a, k), sv(np.roll(pi, -1) - b, k))
    elif kind == "W":
        a, b = params["a"], params["b"]
        nxt = np.roll(pi, -1)
        s = prod(sv(pi - a, k) - sv(pi, k), sv(nxt - b, k) - sv(nxt, k))
    elif kind == "J":
        m = params["m"]
        s = F(sum(x**m * y for x, y in zip(range(k), pi.tolist())))
    elif kind == "U":
        base_j, base_p = sv(j, k), sv(pi, k)
        acc = 0
        for b in range(k):
            acc += int(((sv(j - b, k) - base_j) * (sv(pi - pi[b], k) - base_p)).sum())
        s = F(acc, 4 * k * k)
    elif kind == "Q":
        s = F(int(sv(j * j, k).sum()), 2 * k)
    elif kind == "QF":
        return F(int((j * j // k).sum()))
    else:
        raise ValueError(f"unknown sum kind {kind!r}")
    return s * scale_of(kind, k)
