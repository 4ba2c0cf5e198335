"""Serially pruned interleavers.

A mother permutation of length ``k`` is pruned to length ``beta`` by
dropping every image ``>= beta`` and keeping the survivors in order.  The
pruning gap ``Delta_x`` is the number of dropped positions before the
``x``-th survivor.

* :func:`spbri` walks positions one by one (the reference).
* :func:`minimal_inliers` finds a gap as the fixed point of
  ``Delta -> #OUL_{alpha+Delta, beta}``, so it costs a handful of inlier
  counts instead of a linear walk.
* :func:`ppbri` splits ``[0, beta)`` into windows, seeds each window with
  :func:`minimal_inliers` and fills them independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ._ops import tick
from ._validation import check_bound, check_int, check_power_of_two
from .inliers import inl
from .perms import BitReversal, Permutation, _brp


def as_perm(perm_or_k) -> Permutation:
    """Integers stand for the bit reversal of that length."""
    if isinstance(perm_or_k, Permutation):
        return perm_or_k
    n = check_power_of_two(perm_or_k)
    return BitReversal(n)


def _evaluator(perm):
    if isinstance(perm, BitReversal):
        n = perm.nbits
        return lambda j: _brp(n, j)
    if perm.k <= (1 << 24):
        t = perm.table().tolist()
        return t.__getitem__
    return perm


# --------------------------------------------------------------------------
# serial reference


class SerialInconsistency(ValueError):
    """The supplied starting gap ran past the end of the mother permutation."""


def spbri(perm_or_k, w1, w2, beta, delta_w1=0):
    """Serial pruned interleaving of outputs ``w1..w2``.

    Returns ``(addresses, delta)`` where ``addresses[i]`` is the image of
    pruned index ``w1 + i`` and ``delta`` is the gap at ``w2``.
    """
    perm = as_perm(perm_or_k)
    k = perm.k
    beta = check_bound(beta, k, "beta", allow_zero=False)
    w1, w2 = check_int(w1, "w1"), check_int(w2, "w2")
    if not 0 <= w1 <= w2 < beta:
        raise ValueError(f"need 0 <= w1 <= w2 < beta, got w1={w1}, w2={w2}, beta={beta}")
    ev = _evaluator(perm)
    w, delta = w1, check_int(delta_w1, "delta_w1")
    out = []
    evals = 0
    while w <= w2:
        pos = w + delta
        if pos >= k:
            raise SerialInconsistency(f"position {pos} ran past k={k}; starting gap {delta_w1} is wrong")
        y = ev(pos)
        evals += 1
        if y < beta:
            out.append(y)
            w += 1
        else:
            delta += 1
    tick(evals=evals)
    return np.array(out, dtype=np.int64), delta


def spbri_fast(perm_or_k, w1, w2, beta, delta_w1=0):
    """Vectorised equivalent of :func:`spbri` for tabulable permutations.

    Counts one evaluation per scanned position, the same as the loop.
    """
    perm = as_perm(perm_or_k)
    k = perm.k
    beta = check_bound(beta, k, "beta", allow_zero=False)
    if not 0 <= w1 <= w2 < beta:
        raise ValueError(f"need 0 <= w1 <= w2 < beta, got w1={w1}, w2={w2}, beta={beta}")
    start = w1 + delta_w1
    t = perm.table()[start:]
    keep = np.flatnonzero(t < beta)
    need = w2 - w1 + 1
    if keep.size < need:
        raise SerialInconsistency(f"starting gap {delta_w1} leaves too few survivors")
    idx = keep[:need]
    tick(evals=int(idx[-1]) + 1)
    return t[idx].astype(np.int64), delta_w1 + int(idx[-1]) - (need - 1)


def serial_gap(perm_or_k, x, beta):
    """``Delta_x`` by the serial walk (reference for the fast solvers)."""
    return spbri_fast(perm_or_k, 0, x, beta, 0)[1]


def serial_prefix_gap(perm_or_k, alpha, beta):
    """Smallest ``Delta`` with exactly ``alpha`` survivors among the first ``alpha + Delta`` positions, by scan."""
    perm = as_perm(perm_or_k)
    if alpha == 0:
        return 0
    t = perm.table()
    keep = np.flatnonzero(t < beta)
    if keep.size < alpha:
        raise ValueError("alpha exceeds the number of survivors")
    return int(keep[alpha - 1]) + 1 - alpha


# --------------------------------------------------------------------------
# minimal inliers


@dataclass
class GapTrace:
    iterates: list = field(default_factory=list)
    converged: bool = False
    finalGap: int = 0

    @property
    def iterations(self):
        """Index ``t`` of the first iterate equal to the fixed point."""
        return self.iterates.index(self.finalGap) + 1 if self.converged else len(self.iterates)

    def to_dict(self):
        return {"iterates": list(self.iterates), "converged": self.converged,
                "finalGap": self.finalGap, "iterations": self.iterations}


def minimal_inliers(perm_or_k, alpha, beta, backend: Callable | None = None, max_iter=None, verify=True):
    """Gap solver: iterate ``Delta <- #OUL_{alpha+Delta, beta}`` to its fixed point.

    ``backend(perm, a, b)`` counts inliers; the default dispatches to the
    fastest exact counter for ``perm``.  ``iterates`` holds
    ``Delta^(1), Delta^(2), ...`` including the repeat that stops the loop.
    """
    perm = as_perm(perm_or_k)
    k = perm.k
    backend = backend or inl
    alpha = check_bound(alpha, k, "alpha")
    beta = check_bound(beta, k, "beta")
    if alpha > beta:
        raise ValueError(f"alpha={alpha} > beta={beta}: only beta survivors exist")
    max_iter = max_iter or k + 2
    trace = GapTrace()
    prev = 0
    for _ in range(max_iter):
        a = alpha + prev
        cur = a - backend(perm, a, beta)
        trace.iterates.append(cur)
        if cur == prev:
            trace.converged = True
            break
        prev = cur
    trace.finalGap = prev
    if not trace.converged:
        raise RuntimeError(f"no fixed point after {max_iter} iterations")
    if verify:
        end = alpha + prev
        if backend(perm, end, beta) != alpha:
            raise AssertionError("fixed point does not hold exactly alpha inliers")
        if alpha > 0 and backend(perm, end - 1, beta) != alpha - 1:
            raise AssertionError("fixed point is not the smallest interval")
    return trace


def gap(perm_or_k, alpha, beta, backend=None):
    return minimal_inliers(perm_or_k, alpha, beta, backend, verify=False).finalGap


# --------------------------------------------------------------------------
# parallel


@dataclass
class ParallelResult:
    addresses: np.ndarray
    seeds: list
    windows: list  # (w1, w2) per window


def ppbri(perm_or_k, p, beta, backend=None, executor=None, fast=False, details=False):
    """Parallel pruned interleaving with ``p`` windows (plus a remainder window).

    Window seeds are independent, and so are window fills; ``executor``
    (anything with ``map``) runs each phase concurrently.  Output order is
    fixed by window index, so scheduling never changes the result.
    """
    perm = as_perm(perm_or_k)
    k = perm.k
    p = check_int(p, "p")
    beta = check_bound(beta, k, "beta", allow_zero=False)
    if p < 1:
        raise ValueError("p must be >= 1")
    if p > beta:
        raise ValueError(f"p={p} exceeds beta={beta}")
    L = beta // p
    windows = [(i * L, (i + 1) * L - 1) for i in range(p)]
    if beta % p:
        windows.append((p * L, beta - 1))
    run = executor.map if executor is not None else map
    seeds = list(run(lambda w: gap(perm, w[0], beta, backend), windows))
    fill = spbri_fast if fast else spbri
    parts = list(run(lambda ws: fill(perm, ws[0][0], ws[0][1], beta, ws[1])[0], zip(windows, seeds)))
    out = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    if details:
        return ParallelResult(out, seeds, windows)
    return out


# --------------------------------------------------------------------------
# bounds and convergence


@dataclass(frozen=True)
class GapBounds:
    """Fixed-point bounds ``Delta*_l <= Delta <= Delta*_u`` for a fixed ``(k, alpha)``."""

    k: int
    alpha: int
    W_l: Fraction
    W_u: Fraction

    def lower(self, beta):
        return self._at(beta, self.W_l)

    def upper(self, beta):
        return self._at(beta, self.W_u)

    def _at(self, beta, w):
        beta = check_bound(beta, self.k, "beta", allow_zero=False)
        return self.alpha * (Fraction(self.k, beta) - 1) + w * Fraction(self.k, beta)


def gap_bounds(k, alpha):
    """Exact lower/upper bound curves over ``beta``, from the extremes of ``T`` and ``K_INL``."""
    n = check_power_of_two(k, min_bits=2)
    alpha = check_bound(alpha, k, "alpha")
    base = Fraction(11 - 12 * n, 36) - Fraction(3, 4)
    corr = Fraction(4, 9 * k)
    W_l = base + corr if n % 2 == 0 else base - corr
    if n % 2 == 0:
        W_u = 1 + Fraction(1, k) - Fraction(2, 1 << (n // 2))
    else:
        W_u = 1 + Fraction(1, k) - Fraction(3, 2 * (1 << ((n - 1) // 2)))
    return GapBounds(k, alpha, W_l, W_u)


@dataclass
class Convergence:
    mu: float
    rates: list
    mid_rates: list
    measured: float
    max_deviation: float
    iterations: int
    iteration_bound: int


def iteration_bound(k, beta):
    mu = 1 - beta / k
    if mu <= 0:
        return 1
    return math.ceil(math.log(k) / math.log(1 / mu)) + 3


def convergence_check(trace: GapTrace, k, beta):
    """Compare the observed contraction of a trace with ``mu = 1 - beta/k``.

    Per-step ratios ``|e_{t+1}| / |e_t|`` use the error to the fixed point.
    Mid-trajectory ratios drop the first step and every step whose error is
    already below ``1 / (1 - mu)``, where integer rounding dominates.  The
    measured rate is their geometric mean.
    """
    it = trace.iterates
    mu = 1 - beta / k
    if beta == k:
        return Convergence(0.0, [], [], 0.0, 0.0, len(it), 1)
    if len(it) < 3:
        raise ValueError("trace too short to estimate a rate")
    star = trace.finalGap
    errs = [abs(star)] + [abs(x - star) for x in it]  # Delta^(0) = 0
    rates = [errs[t + 1] / errs[t] for t in range(len(errs) - 1) if errs[t] > 0]
    floor_err = 1 / (1 - mu)
    mid = [errs[t + 1] / errs[t] for t in range(1, len(errs) - 1) if errs[t] > 0 and errs[t + 1] >= floor_err]
    if not mid:
        mid = rates
    measured = math.exp(sum(math.log(r) for r in mid) / len(mid)) if all(r > 0 for r in mid) else 0.0
    dev = max(abs(r - mu) for r in mid)
    return Convergence(mu, rates, mid, measured, dev, trace.iterations, iteration_bound(k, beta))


# --------------------------------------------------------------------------
# spread


def pruned_map(perm, beta):
    """Images of the pruned interleaver of length ``beta``, in order."""
    t = perm.table()
    return t[t < beta]


def min_spread_of(values):
    """``min |v_i - v_j| + |i - j|`` over all ``i != j``."""
    v = np.asarray(values, dtype=np.int64)
    best = None
    d = 1
    while d < v.size and (best is None or d < best):
        s = int(np.abs(v[d:] - v[:-d]).min()) + d
        best = s if best is None else min(best, s)
        d += 1
    return best


def pruned_spread(perm, beta):
    """Minimum spread of ``perm`` serially pruned to length ``beta`` (``k <= 2**12``)."""
    if perm.k > 1 << 12:
        raise ValueError("pruned spread enumeration capped at k=4096")
    return min_spread_of(pruned_map(perm, beta))


def spread_lower_bound(s_min, gamma, g, k):
    """Guaranteed minimum spread after pruning ``g`` positions.

    With ``x = gamma + g/k`` the bound ``S_min / (1+x)**t`` and
    ``t = -log(1-x)/log(1+x)`` collapse to ``S_min (1 - x)`` exactly;
    the floor of that value is returned.
    """
    x = Fraction(str(gamma)) + Fraction(g, k)
    if x >= 1:
        raise ValueError("gamma + g/k must stay below 1")
    if x <= 0:
        return s_min
    return math.floor(s_min * (1 - x))


def spread_lower_bound_literal(s_min, gamma, g, k):
    """Float evaluation of the bound in its original power form."""
    x = gamma + g / k
    if x >= 1:
        raise ValueError("gamma + g/k must stay below 1")
    t = -math.log(1 - x) / math.log(1 + x)
    return s_min / (1 + x) ** t
