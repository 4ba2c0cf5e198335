"""Serial versus windowed pruning over the benchmark interleaver families.

Operation counts (permutation evaluations plus recursion steps) are the
primary metric because they are identical on every machine.  Wall time is
optional and never recorded for a point whose windowed output disagrees
with the serial walk.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from ._ops import counting
from .inliers import has_fast_path
from .perms import LCS, QPP, BitReversal, Block2D, Flip, MStream
from .pruning import ppbri, minimal_inliers, spbri_fast

CSV_HEADER = "# prunedperm-csv v1"

FAMILIES = (
    "brev1D", "lcs1D",
    "brev-brev2D", "brev-brevrev2D", "lcs-brev2D", "lcs-qpp2D",
    "brev-brev2S", "lcs-brev2S", "lcs-lcs2S",
)

COLUMNS = [
    "family", "n", "p", "beta", "trial", "fast_backend",
    "serial_ops", "parallel_ops", "parallel_total_ops", "speedup",
    "gap_serial_ops", "gap_mi_ops", "gap_speedup", "verified",
    "serial_time_s", "parallel_time_s", "gap_serial_time_s", "gap_mi_time_s",
]


def _odd_h(k1, rng):
    # random odd multiplier from {1, 3, ..., <= k1/2}
    top = max(1, k1 // 2)
    return int(rng.choice(np.arange(1, top + 1, 2)))


def family_perm(name, n, seed=0):
    """Build the mother permutation of ``family`` at size ``2**n``."""
    rng = np.random.default_rng(seed)
    k = 1 << n
    if name == "brev1D":
        return BitReversal(n)
    if name == "lcs1D":
        return LCS(k, k // 2 - 1)
    if name == "brev-brev2D":
        n2 = (n + 1) // 2
        return Block2D(BitReversal(n - n2), BitReversal(n2))
    if name == "brev-brevrev2D":
        n2 = (n + 1) // 2
        return Block2D(BitReversal(n - n2), Flip(BitReversal(n2)))
    if name == "lcs-brev2D":
        n1 = n - 6
        if n1 < 1:
            raise ValueError("lcs-brev2D needs n >= 7")
        return Block2D(LCS(1 << n1, _odd_h(1 << n1, rng)), BitReversal(6))
    if name == "lcs-qpp2D":
        n1 = n - 5
        if n1 < 1:
            raise ValueError("lcs-qpp2D needs n >= 6")
        return Block2D(LCS(1 << n1, _odd_h(1 << n1, rng)), QPP(32, 15, 2))
    if name == "brev-brev2S":
        s = BitReversal(n - 1)
        return MStream((s, Flip(s)), (0, 1))
    if name == "lcs-brev2S":
        return MStream((LCS(k // 2, k // 4 - 1), BitReversal(n - 1)), (0, 1))
    if name == "lcs-lcs2S":
        return MStream((LCS(k // 2, k // 4 - 1), LCS(k // 2, k // 4 + 1)), (0, 1))
    raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


@dataclass
class BenchConfig:
    families: list = field(default_factory=lambda: list(FAMILIES))
    sizes: list = field(default_factory=lambda: list(range(10, 17)))
    parallelism: list = field(default_factory=lambda: [8])
    trials: int = 1
    seed: int = 0
    beta_frac: float = 0.75
    timing: bool = False

    def __post_init__(self):
        for f in self.families:
            if f not in FAMILIES:
                raise ValueError(f"unknown family {f!r}")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if not 0 < self.beta_frac <= 1:
            raise ValueError("beta_frac must lie in (0, 1]")
        if any(p < 1 for p in self.parallelism):
            raise ValueError("parallelism values must be >= 1")


class VerificationFailure(RuntimeError):
    pass


def _timed(fn, on):
    t0 = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t0 if on else None)


def bench_point(family, n, p, beta_frac=0.75, seed=0, timing=False, trial=0):
    perm = family_perm(family, n, seed)
    k = perm.k
    beta = max(1, min(k, int(k * beta_frac)))
    p = min(p, beta)

    with counting() as s_ops:
        serial, t_serial = _timed(lambda: spbri_fast(perm, 0, beta - 1, beta, 0)[0], timing)

    res = ppbri(perm, p, beta, fast=True, details=True)
    verified = bool(np.array_equal(res.addresses, serial))
    if not verified:
        raise VerificationFailure(f"{family} n={n} p={p}: windowed output differs from serial")

    # per-window cost: seed solve plus fill; the critical path is the max
    window_ops = []
    for (w1, w2), seed_gap in zip(res.windows, res.seeds):
        with counting() as w_ops:
            minimal_inliers(perm, w1, beta, verify=False)
            spbri_fast(perm, w1, w2, beta, seed_gap)
        window_ops.append(w_ops.total)
    t_par = None
    if timing:
        _, t_par = _timed(lambda: ppbri(perm, p, beta, fast=True), True)

    x = beta - 1
    with counting() as g_serial:
        _, t_gs = _timed(lambda: spbri_fast(perm, 0, x, beta, 0), timing)
    with counting() as g_mi:
        _, t_gm = _timed(lambda: minimal_inliers(perm, x, beta), timing)

    def ratio(a, b):
        return round(a / b, 6) if b else None

    return {
        "family": family, "n": n, "p": p, "beta": beta, "trial": trial,
        "fast_backend": has_fast_path(perm),
        "serial_ops": s_ops.total, "parallel_ops": max(window_ops),
        "parallel_total_ops": sum(window_ops),
        "speedup": ratio(s_ops.total, max(window_ops)),
        "gap_serial_ops": g_serial.total, "gap_mi_ops": g_mi.total,
        "gap_speedup": ratio(g_serial.total, g_mi.total),
        "verified": verified,
        "serial_time_s": t_serial, "parallel_time_s": t_par,
        "gap_serial_time_s": t_gs, "gap_mi_time_s": t_gm,
    }


def run_bench(config: BenchConfig):
    rows = []
    for trial in range(config.trials):
        for fam in sorted(config.families):
            for n in sorted(config.sizes):
                for p in sorted(config.parallelism):
                    rows.append(bench_point(fam, n, p, config.beta_frac, config.seed, config.timing, trial))
    rows.sort(key=lambda r: (r["family"], r["n"], r["p"], r["trial"]))
    return rows


def rows_to_csv(rows):
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: ("" if r.get(c) is None else r[c]) for c in COLUMNS})
    return buf.getvalue()
