"""Counting permutation inliers.

An ``(alpha, beta)``-inlier of ``pi`` is an index ``j < alpha`` with
``pi(j) < beta``; outliers are the remaining ``j < alpha``.  Brute force
works for any permutation.  Bit reversal gets a logarithmic-time path,
circular shifts a closed form, and the composite interleavers reduce to
their components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._ops import tick
from ._validation import (
    InexactDivision,
    MAX_ENUM_BITS,
    check_bound,
    check_int,
    checked,
    check_power_of_two,
    exact_div,
)
from .perms import (
    BitReversal,
    Block2D,
    Circular,
    Flip,
    MStream,
    Permutation,
    _brp,
)
from .sawsums import MAX_BATCH_BITS, T_batch, T_rec, W_rec, _brp_vec

MAX_BRUTE = 1 << MAX_ENUM_BITS
MAX_SETS = 1 << 16

# --------------------------------------------------------------------------
# brute force


def _check_query(k, alpha, beta):
    return check_bound(alpha, k, "alpha"), check_bound(beta, k, "beta")


def inl_brute(perm: Permutation, alpha, beta, return_set=False):
    """Linear scan over ``j < alpha``."""
    k = perm.k
    if k > MAX_BRUTE:
        raise ValueError(f"brute force capped at k={MAX_BRUTE}")
    alpha, beta = _check_query(k, alpha, beta)
    tick(evals=alpha)
    hits = perm.table()[:alpha] < beta
    if return_set:
        if k > MAX_SETS:
            raise ValueError(f"inlier sets are only returned for k <= {MAX_SETS}")
        return np.flatnonzero(hits).tolist()
    return int(np.count_nonzero(hits))


def oul_count(perm, alpha, beta):
    return alpha - inl(perm, alpha, beta)


class BruteIndex:
    """Brute-force inlier counts for many queries on one large permutation.

    A coarse 2D prefix-count grid with block size ``B`` answers the aligned
    part of a query; two strips of at most ``B`` entries are scanned
    directly.  No recursion is involved, so this is an independent oracle.
    """

    def __init__(self, perm: Permutation, block=None):
        k = perm.k
        if k > MAX_BRUTE:
            raise ValueError(f"brute force capped at k={MAX_BRUTE}")
        n = max(0, (k - 1).bit_length())
        self.B = block or max(1, 1 << ((n + 1) // 2))
        self.k = k
        self.table = perm.table()
        inv = np.empty(k, dtype=np.int64)
        inv[self.table] = np.arange(k, dtype=np.int64)
        self.inverse = inv
        g = -(-k // self.B)
        hist = np.zeros((g + 1, g + 1), dtype=np.int64)
        np.add.at(hist, (np.arange(k) // self.B + 1, self.table // self.B + 1), 1)
        self.grid = hist.cumsum(0).cumsum(1)

    def count(self, alpha, beta):
        alpha, beta = _check_query(self.k, alpha, beta)
        B = self.B
        ab, bb = alpha // B, beta // B
        a0, b0 = ab * B, bb * B
        total = int(self.grid[ab, bb])
        total += int(np.count_nonzero(self.table[a0:alpha] < beta))
        total += int(np.count_nonzero(self.inverse[b0:beta] < a0))
        return total


# --------------------------------------------------------------------------
# bit reversal


def k_inl(k, alpha, beta):
    """Correction term of the fast count, one of 0, +-1/4, 1/2, 3/4."""
    n = check_power_of_two(k)
    alpha, beta = _check_query(k, alpha, beta)
    return Fraction(_k_inl4(k, n, alpha, beta), 4)


def _k_inl4(k, n, alpha, beta):
    # 4 * K_INL on the interior 0 < alpha, beta < k
    if alpha == 0 or beta == 0:
        return 0
    pa = _brp(n, alpha % k)
    pb = _brp(n, beta % k)
    if pa == beta:
        return 2
    if pa > beta:
        return 3 if pb > alpha else 1
    return 1 if pb > alpha else -1


class InlDetail(NamedTuple):
    count: int
    T: int
    K4: int  # 4 * K_INL


def inl_brp_detail(k, alpha, beta):
    """Fast count plus its ingredients ``T`` (scale 4k) and ``4 K_INL``."""
    n = check_power_of_two(k)
    alpha, beta = _check_query(k, alpha, beta)
    if alpha == 0 or beta == 0:
        return InlDetail(0, 0, 0)
    if alpha == k:
        return InlDetail(beta, 0, 0)
    if beta == k:
        return InlDetail(alpha, 0, 0)
    T = T_rec(k, alpha, beta)
    K4 = _k_inl4(k, n, alpha, beta)
    num = checked(4 * alpha * beta + T + k * K4)
    return InlDetail(exact_div(num, 4 * k, "inl_brp"), T, K4)


def inl_brp(k, alpha, beta):
    """``#INL_{alpha,beta}(pi_n)`` in ``O(n)`` integer steps.

    The whole expression ``(4 alpha beta + T + 4k K) / 4k`` is formed in
    integers and a nonzero remainder raises
    :class:`~prunedperm._validation.InexactDivision`.
    """
    return inl_brp_detail(k, alpha, beta).count


def inl_brp_batch(k, alpha, beta):
    """Vectorised :func:`inl_brp` over integer arrays (``k <= 2**30``)."""
    n = check_power_of_two(k, max_bits=MAX_BATCH_BITS)
    a, b = np.broadcast_arrays(np.asarray(alpha, dtype=np.int64), np.asarray(beta, dtype=np.int64))
    if a.size and (a.min() < 0 or a.max() > k or b.min() < 0 or b.max() > k):
        raise ValueError("alpha and beta must lie in [0, k]")
    am, bm = a % k, b % k
    T = T_batch(k, am, bm)
    pa = _brp_vec(n, am)
    pb = _brp_vec(n, bm)
    K4 = np.where(pa == bm, 2, np.where(pa > bm, np.where(pb > am, 3, 1), np.where(pb > am, 1, -1)))
    num = 4 * a * b + T + k * K4
    q, r = np.divmod(num, 4 * k)
    out = np.where(a == k, b, np.where(b == k, a, q))
    out = np.where((a == 0) | (b == 0), 0, out)
    interior = (a > 0) & (b > 0) & (a < k) & (b < k)
    if np.any(r[interior]):
        raise InexactDivision("inl_brp_batch: nonzero remainder")
    return out


def sandwich_constants(k):
    """Measured ``(c1, c2)`` with ``alpha beta/k - c1 <= INL <= alpha beta/k + c2``.

    Exhaustive over ``(alpha, beta)``; ``k <= 2**12``.
    """
    check_power_of_two(k, max_bits=12)
    c1 = c2 = Fraction(0)
    betas = np.arange(k + 1, dtype=np.int64)
    for a in range(k + 1):
        row = inl_brp_batch(k, a, betas)
        # diff * k = INL * k - a * beta
        d = row * k - a * betas
        c1 = max(c1, Fraction(-int(d.min()), k))
        c2 = max(c2, Fraction(int(d.max()), k))
    return c1, c2


# --------------------------------------------------------------------------
# circular shift


def inl_circular(k, c, alpha, beta):
    """Closed form for ``pi(j) = j + c mod k``."""
    k = check_int(k, "k")
    c = check_int(c, "c")
    if not 0 <= c < k:
        raise ValueError(f"c={c} out of range [0, {k})")
    alpha, beta = _check_query(k, alpha, beta)
    if alpha == k:
        return beta
    if beta == k:
        return alpha
    return min(alpha, (beta - c) % k) + alpha * ((beta - c) // k) - min(alpha, k - c) + alpha


# --------------------------------------------------------------------------
# bounded regions


@dataclass(frozen=True)
class BoundedQuery:
    alpha1: int
    alpha2: int
    beta1: int
    beta2: int

    def __post_init__(self):
        if not 0 <= self.alpha1 < self.alpha2:
            raise ValueError("need 0 <= alpha1 < alpha2")
        if not 0 <= self.beta1 < self.beta2:
            raise ValueError("need 0 <= beta1 < beta2")


def inl_bounded(backend, q: BoundedQuery):
    """Inliers of the region ``alpha1 <= j < alpha2, beta1 <= pi(j) < beta2``.

    ``backend(alpha, beta)`` counts ordinary inliers.
    """
    return (backend(q.alpha2, q.beta2) - backend(q.alpha2, q.beta1)) - (
        backend(q.alpha1, q.beta2) - backend(q.alpha1, q.beta1)
    )


def prob_bounded(backend, q: BoundedQuery, k):
    if q.alpha2 > k or q.beta2 > k:
        raise ValueError("region exceeds [k] x [k]")
    return Fraction(inl_bounded(backend, q), k)


# --------------------------------------------------------------------------
# successive inliers


def sinl_brute(perm, alpha, beta):
    """``#{j : pi(j) < alpha and pi(j+1 mod k) < beta}`` by scan."""
    k = perm.k
    alpha, beta = _check_query(k, alpha, beta)
    t = perm.table()
    return int(np.count_nonzero((t < alpha) & (np.roll(t, -1) < beta)))


SINL_K_VALUES = frozenset(Fraction(x, 4) for x in (-4, -3, -2, -1, 0, 1))


def _k_sinl4(k, n, alpha, beta):
    # evaluated term by term; the caller asserts the result set
    pa = _brp(n, alpha % k)
    pb = _brp(n, beta % k)
    ap = _brp(n, (pa + 1) % k)
    bp = _brp(n, (pb - 1) % k)
    h = k // 2
    return (
        2 * ((bp - alpha) // k) - ((bp - alpha) % k == 0) + ((alpha + 1) % k == 0)
        + 2 * ((ap - beta) // k) - 2 * ((h - beta) // k) + ((h - beta) % k == 0)
    )


def sinl_brp(k, alpha, beta):
    """Successive inliers of the bit reversal via the ``W`` recursion."""
    n = check_power_of_two(k)
    alpha, beta = _check_query(k, alpha, beta)
    if alpha == 0 or beta == 0:
        return 0
    if alpha == k:
        return beta
    if beta == k:
        return alpha
    if 2 * alpha <= k and 2 * beta <= k:
        return 0
    K4 = _k_sinl4(k, n, alpha, beta)
    if Fraction(K4, 4) not in SINL_K_VALUES:
        raise AssertionError(f"K_SINL={Fraction(K4, 4)} outside its known value set")
    W = W_rec(k, alpha, beta)
    num = checked(alpha * beta * k + W + exact_div(k * k * K4, 4, "K_SINL"))
    return exact_div(num, k * k, "sinl_brp")


def inl_successor_identity_check(k, alpha, beta):
    """Check ``sum_j floor((j-alpha)/k) floor((pi(j+1)-beta)/k) == #INL_{alpha+1,beta} - 1``."""
    n = check_power_of_two(k, max_bits=MAX_ENUM_BITS)
    alpha, beta = _check_query(k, alpha, beta)
    if alpha == 0 or beta == 0 or alpha >= k:
        raise ValueError("need 0 < alpha < k and beta > 0")
    t = BitReversal(n).table()
    nxt = np.roll(t, -1)[:alpha]
    lhs = int(np.count_nonzero(nxt < beta))  # both floors are -1 exactly here
    return lhs == inl_brp(k, alpha + 1, beta) - 1


# --------------------------------------------------------------------------
# composites and dispatch


def inl_block2d(s1, s2, alpha, beta, backend=None):
    """Inliers of the 2D block interleaver ``pi(x) = s2(x2) k1 + s1(x1)``.

    Returns ``(count, parts)`` where ``parts`` holds the four summands.
    """
    backend = backend or inl
    k1, k2 = s1.k, s2.k
    k = k1 * k2
    alpha, beta = _check_query(k, alpha, beta)
    a1, a2 = divmod(alpha, k2)
    b1, b2 = divmod(beta, k1)
    if a1 == k1:
        a1, a2 = k1 - 1, k2  # alpha == k: whole last row
    if b1 == k2:
        b1, b2 = k2 - 1, k1
    full = a1 * b1
    row = backend(s2, a2, b1)
    col = backend(s1, a1, b2)
    corner = 1 if (s1(a1) < b2 and s2.inverse(b1) < a2) else 0
    tick(evals=2)
    return full + row + col + corner, (full, row, col, corner)


def inl_mstream(sigmas, omega, alpha, beta, backend=None):
    backend = backend or inl
    m = len(sigmas)
    k = m * sigmas[0].k
    alpha, beta = _check_query(k, alpha, beta)
    total = 0
    for j in range(m):
        w = omega[j]
        total += backend(sigmas[w], (alpha - j - 1 + m) // m, (beta - w - 1 + m) // m)
    return total


def inl_2stream(s0, s1, alpha, beta, backend=None):
    """Two-stream form with ceilings and floors (``omega`` = identity)."""
    backend = backend or inl
    return backend(s0, -(-alpha // 2), -(-beta // 2)) + backend(s1, alpha // 2, beta // 2)


def inl(perm: Permutation, alpha, beta):
    """Dispatch to the fastest exact counter for ``perm``."""
    if isinstance(perm, BitReversal):
        tick(evals=1)
        return inl_brp(perm.k, alpha, beta)
    if isinstance(perm, Circular):
        tick(evals=1)
        return inl_circular(perm.k, perm.c, alpha, beta)
    if isinstance(perm, Flip):
        alpha, beta = _check_query(perm.k, alpha, beta)
        return alpha - inl(perm.inner, alpha, perm.k - beta)
    if isinstance(perm, Block2D):
        return inl_block2d(perm.s1, perm.s2, alpha, beta)[0]
    if isinstance(perm, MStream):
        return inl_mstream(perm.sigmas, perm.omega, alpha, beta)
    return inl_brute(perm, alpha, beta)


def has_fast_path(perm):
    if isinstance(perm, (BitReversal, Circular)):
        return True
    if isinstance(perm, Flip):
        return has_fast_path(perm.inner)
    if isinstance(perm, Block2D):
        return has_fast_path(perm.s1) and has_fast_path(perm.s2)
    if isinstance(perm, MStream):
        return all(has_fast_path(s) for s in perm.sigmas)
    return False
