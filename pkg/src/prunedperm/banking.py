"""Contention-free memory banking for a parallel pruned permutation stage.

``k = W * M`` items sit in ``M`` read banks of ``W`` words; linear address
``i = j + t W`` is word ``j`` of bank ``t``.  In step ``j`` every bank
reads its word ``j`` and the item is written to bank ``B(pi(i))`` of the
write side.  The permutation is contention-free when those ``M`` write
banks are distinct for every ``j``.

With pruning, items whose image is ``>= beta`` are dropped.  The bank that
holds a dropped item stalls for that step, and the survivors carry their
pruned index ``i - Delta(j, t)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ._validation import bit_count, check_bound, check_int
from .inliers import inl
from .perms import Permutation, Table, brp_table
from .pruning import as_perm

MODES = ("msb", "lsb")


class ContentionError(RuntimeError):
    def __init__(self, j, t, v, bank):
        super().__init__(f"step j={j}: windows t={t} and v={v} both hit bank {bank}")
        self.witness = (j, t, v)
        self.bank = bank


@dataclass(frozen=True)
class BankLayout:
    W: int
    M: int
    mode: str = "lsb"

    def __post_init__(self):
        bit_count(self.W, "W")
        bit_count(self.M, "M")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    @property
    def k(self):
        return self.W * self.M

    def check(self, k):
        if k != self.k:
            raise ValueError(f"layout W*M={self.k} does not match permutation length {k}")


def bank_of(i, layout: BankLayout):
    i = check_int(i, "i")
    if not 0 <= i < layout.k:
        raise ValueError(f"address {i} outside [0, {layout.k})")
    return i // layout.W if layout.mode == "msb" else i % layout.M


def _banks(values, layout):
    return values // layout.W if layout.mode == "msb" else values % layout.M


def contention_check(perm: Permutation, layout: BankLayout):
    """``(ok, witness)``; the witness is ``(j, t, v)`` for the first clash or None."""
    layout.check(perm.k)
    grid = perm.table().reshape(layout.M, layout.W)  # grid[t, j] = pi(j + tW)
    banks = _banks(grid, layout)
    order = np.sort(banks, axis=0)
    clash = (order[1:] == order[:-1]).any(axis=0)
    if not clash.any():
        return True, None
    j = int(np.flatnonzero(clash)[0])
    col = banks[:, j].tolist()
    seen = {}
    for t, b in enumerate(col):
        if b in seen:
            return False, (j, seen[b], t)
        seen[b] = t
    raise AssertionError("unreachable")


def brp_window_identity(n, w):
    """Check ``pi_n(j + tW) == M pi_w(j) + pi_m(t)`` for every ``j, t``."""
    m = n - w
    W, M = 1 << w, 1 << m
    full = brp_table(n).reshape(M, W)
    expect = M * brp_table(w)[None, :] + brp_table(m)[:, None]
    return bool((full == expect).all())


def random_cf_perm(W, M, mode="lsb", seed=0):
    """A random permutation that is contention-free for ``BankLayout(W, M, mode)``.

    For each word ``j`` the ``M`` windows get distinct banks through a
    random bijection, and each bank's ``W`` slots are filled by another
    random bijection over ``j``.
    """
    rng = np.random.default_rng(seed)
    sigma = np.array([rng.permutation(M) for _ in range(W)])  # sigma[j, t] = bank
    rho = np.array([rng.permutation(W) for _ in range(M)])  # rho[b, j] = slot
    out = np.empty(W * M, dtype=np.int64)
    for j in range(W):
        for t in range(M):
            b = sigma[j, t]
            slot = rho[b, j]
            out[j + t * W] = M * slot + b if mode == "lsb" else W * b + slot
    return Table.from_array(out)


# --------------------------------------------------------------------------
# gap table


@dataclass
class GapTable:
    """``delta[t, j]`` is the number of pruned positions among ``0..j+tW``."""

    delta: np.ndarray
    W: int
    M: int

    def at(self, j, t):
        return int(self.delta[t, j])

    def rows(self):
        return self.delta.tolist()


def gap_table(perm_or_k, beta, W, M, backend=None):
    """Per-window gap table.

    Row starts come from one inlier count each; the rest of a row follows
    the increment rule, and every row end is checked against the next
    row's start.
    """
    perm = as_perm(perm_or_k)
    k = perm.k
    layout = BankLayout(W, M)
    layout.check(k)
    beta = check_bound(beta, k, "beta", allow_zero=False)
    backend = backend or inl
    t_img = perm.table().reshape(M, W)
    out = np.empty((M, W), dtype=np.int64)
    for t in range(M):
        a = t * W + 1
        out[t, 0] = a - backend(perm, a, beta)
        for j in range(1, W):
            out[t, j] = out[t, j - 1] + (1 if t_img[t, j] >= beta else 0)
        if t > 0:
            chained = out[t - 1, W - 1] + (1 if t_img[t, 0] >= beta else 0)
            if chained != out[t, 0]:
                raise AssertionError(f"row {t} start {out[t, 0]} does not continue row {t - 1} ({chained})")
    if out[M - 1, W - 1] != k - beta:
        raise AssertionError("gap table does not account for every pruned position")
    return GapTable(out, W, M)


# --------------------------------------------------------------------------
# schedule


@dataclass
class Access:
    step: int
    bank: int
    action: str  # read, write, stall, fill
    linear: int
    permuted: int
    pruned: int = -1


@dataclass
class Schedule:
    steps: list
    stalls: list  # per read bank
    layout: BankLayout
    beta: int
    filler: bool = False
    accesses: list = field(default_factory=list)

    @property
    def totalStalls(self):
        return sum(self.stalls)

    @property
    def read_steps(self):
        return self.layout.W

    @property
    def lockstep_steps(self):
        """Barrier interpretation: every bank advances together, stalls idle."""
        return self.layout.W

    @property
    def per_bank_steps(self):
        """Free-running interpretation: a bank skips its pruned words at no cost."""
        return max(self.layout.W - s for s in self.stalls)

    @property
    def write_steps(self):
        return sum(1 for s in self.steps if any(a.action in ("write", "fill") for a in s))

    @property
    def packed_write_steps(self):
        """Dense packing of the ``beta`` survivors into ``M``-wide steps."""
        return -(-self.beta // self.layout.M)

    @property
    def totalSteps(self):
        return self.lockstep_steps

    def emitted(self):
        """``(pruned index, permuted address)`` for every surviving item."""
        return [(a.pruned, a.permuted) for a in self.accesses if a.action == "write"]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "bank", "action", "linear", "permuted"])
        for a in self.accesses:
            w.writerow([a.step, a.bank, a.action, a.linear, a.permuted])
        return buf.getvalue()

    def summary(self):
        return {
            "k": self.layout.k, "W": self.layout.W, "M": self.layout.M, "mode": self.layout.mode,
            "beta": self.beta, "filler": self.filler, "stalls": self.totalStalls,
            "stalls_per_bank": list(self.stalls), "write_steps": self.write_steps,
            "packed_write_steps": self.packed_write_steps, "read_steps": self.read_steps,
            "lockstep_steps": self.lockstep_steps, "per_bank_steps": self.per_bank_steps,
        }


def schedule_pruned(perm_or_k, beta, layout: BankLayout, filler=False, table=None):
    """Simulate the pruned permutation stage step by step.

    Raises :class:`ContentionError` for a mother permutation that is not
    contention-free, and again if any step double-books a write bank.
    """
    perm = as_perm(perm_or_k)
    k = perm.k
    layout.check(k)
    beta = check_bound(beta, k, "beta", allow_zero=False)
    ok, witness = contention_check(perm, layout)
    if not ok:
        j, t, v = witness
        b = int(_banks(np.array([perm(j + t * layout.W)]), layout)[0])
        raise ContentionError(j, t, v, b)
    gt = table or gap_table(perm, beta, layout.W, layout.M)
    W, M = layout.W, layout.M
    stalls = [0] * M
    steps, accesses = [], []
    for j in range(W):
        step, used = [], {}
        for t in range(M):
            a = j + t * W
            y = perm(a)
            pruned = y >= beta
            if pruned and not filler:
                stalls[t] += 1
                rec = Access(j, t, "stall", a, y)
                step.append(rec)
                accesses.append(rec)
                continue
            accesses.append(Access(j, t, "read", a, y))
            wb = bank_of(y, layout)
            if wb in used:
                raise ContentionError(j, used[wb], t, wb)
            used[wb] = t
            if pruned:
                rec = Access(j, wb, "fill", a, y)
            else:
                rec = Access(j, wb, "write", a, y, a - gt.at(j, t))
            step.append(rec)
            accesses.append(rec)
        steps.append(step)
    return Schedule(steps, stalls, layout, beta, filler, accesses)
