"""Command-line front end.

Commands::

    prunedperm stats   DESC [--lags 1,2] [--format json|csv]
    prunedperm inl     DESC --alpha A --beta B
    prunedperm prune   DESC --beta B [--alpha A] [--p P] [--verify] [--gap-only] [--out FILE]
    prunedperm bench   [--family F ...] [--sizes 10-16] [--p 8,64] [--trials T] [--seed S] [--timing]
    prunedperm banksim DESC --beta B --W W --M M [--mode lsb|msb] [--filler] [--out FILE]

DESC is a permutation descriptor such as ``brp:n=10`` (see
:mod:`prunedperm.perms`).  Exit codes: 0 ok, 1 usage error, 2 verification
failure, 3 arithmetic overflow.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from ._validation import ArithmeticOverflow
from .banking import BankLayout, ContentionError, schedule_pruned
from .bench import CSV_HEADER, FAMILIES, BenchConfig, VerificationFailure, rows_to_csv, run_bench
from .inliers import inl
from .perms import BitReversal, DescriptorError, parse_perm
from .pruning import minimal_inliers, ppbri, spbri_fast
from .stats import brp_report, enum_report

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_OVERFLOW = 0, 1, 2, 3
MAX_MATERIAL = 1 << 24


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _positive(text):
    v = int(text, 0)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    ap = _Parser(prog="prunedperm", description="Pruned bit-reversal permutations: counts, gaps, schedules.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("stats", help="permutation statistics")
    s.add_argument("desc")
    s.add_argument("--lags", default="1", help="comma list of correlation lags")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")

    s = sub.add_parser("inl", help="count (alpha, beta)-inliers")
    s.add_argument("desc")
    s.add_argument("--alpha", type=lambda x: int(x, 0), required=True)
    s.add_argument("--beta", type=lambda x: int(x, 0), required=True)

    s = sub.add_parser("prune", help="pruned interleaving or a single gap")
    s.add_argument("desc")
    s.add_argument("--beta", type=lambda x: int(x, 0), required=True)
    s.add_argument("--alpha", type=lambda x: int(x, 0))
    s.add_argument("--p", type=_positive, default=1)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--gap-only", action="store_true")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.add_argument("--out", help="address file (.bin: little-endian uint32, else CSV)")

    s = sub.add_parser("bench", help="serial vs windowed pruning benchmark")
    s.add_argument("--family", action="append", choices=FAMILIES)
    s.add_argument("--sizes", default="10-16")
    s.add_argument("--p", default="8")
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--beta-frac", type=float, default=0.75)
    s.add_argument("--timing", action="store_true", help="add wall-clock columns (not reproducible)")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.add_argument("--out")

    s = sub.add_parser("banksim", help="simulate the contention-free pruned stage")
    s.add_argument("desc")
    s.add_argument("--beta", type=lambda x: int(x, 0), required=True)
    s.add_argument("--W", type=_positive, required=True)
    s.add_argument("--M", type=_positive, required=True)
    s.add_argument("--mode", choices=("lsb", "msb"), default="lsb")
    s.add_argument("--filler", action="store_true")
    s.add_argument("--out")
    return ap


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_stats(args):
    perm = parse_perm(args.desc)
    lags = _int_list(args.lags)
    closed = enum = None
    if isinstance(perm, BitReversal):
        closed = brp_report(perm.k, lags=lags)
    if perm.k <= 1 << 12:
        enum = enum_report(perm, lags=lags)
    if closed is None and enum is None:
        raise UsageError("enumeration is capped at k=4096 for non bit-reversal permutations")
    if args.format == "json":
        doc = {"k": perm.k}
        if closed is not None:
            doc["closed"] = closed.to_dict()
        if enum is not None:
            doc["enumeration"] = enum.to_dict()
        if closed is not None and enum is not None:
            a, b = closed.to_dict(), enum.to_dict()
            a.pop("source"), b.pop("source")
            doc["agree"] = json.loads(json.dumps(a)) == json.loads(json.dumps(b))
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "statistic", "closed", "enumeration"])
    c_rows = {r[1]: r[2] for r in closed.csv_rows()} if closed else {}
    e_rows = {r[1]: r[2] for r in enum.csv_rows()} if enum else {}
    for key in list(dict.fromkeys(list(c_rows) + list(e_rows))):
        w.writerow([perm.k, key, c_rows.get(key, ""), e_rows.get(key, "")])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_inl(args):
    perm = parse_perm(args.desc)
    print(inl(perm, args.alpha, args.beta))
    return EXIT_OK


def cmd_prune(args):
    perm = parse_perm(args.desc)
    beta = args.beta
    alpha = beta if args.alpha is None else args.alpha
    if args.gap_only:
        trace = minimal_inliers(perm, alpha, beta)
        print(json.dumps(trace.to_dict(), sort_keys=True))
        return EXIT_OK
    if perm.k > MAX_MATERIAL:
        raise UsageError(f"k={perm.k} too large to materialise addresses; use --gap-only")
    if args.p > beta:
        raise UsageError(f"--p {args.p} exceeds beta={beta}")
    res = ppbri(perm, args.p, beta, fast=True, details=True)
    addresses = res.addresses[:alpha]
    status = {"k": perm.k, "alpha": alpha, "beta": beta, "p": args.p,
              "count": int(addresses.size), "seeds": res.seeds}
    code = EXIT_OK
    if args.verify:
        ref = spbri_fast(perm, 0, beta - 1, beta, 0)[0][:alpha]
        ok = bool(np.array_equal(ref, addresses))
        status["verify"] = "OK" if ok else "MISMATCH"
        code = EXIT_OK if ok else EXIT_VERIFY
    if args.out and args.out.endswith(".bin"):
        addresses.astype("<u4").tofile(args.out)
    else:
        if args.format == "json":
            text = json.dumps({"addresses": addresses.tolist()}) + "\n"
        else:
            text = CSV_HEADER + "\nindex,address\n" + "".join(f"{i},{a}\n" for i, a in enumerate(addresses.tolist()))
        if args.out:
            _emit(text, args.out)
        else:
            sys.stdout.write(text)
    print(json.dumps(status, sort_keys=True), file=sys.stderr if not args.out else sys.stdout)
    return code


def cmd_bench(args):
    cfg = BenchConfig(
        families=args.family or list(FAMILIES), sizes=_int_list(args.sizes),
        parallelism=_int_list(args.p), trials=args.trials, seed=args.seed,
        beta_frac=args.beta_frac, timing=args.timing,
    )
    rows = run_bench(cfg)
    if args.format == "json":
        text = json.dumps(rows, sort_keys=True) + "\n"
    else:
        text = rows_to_csv(rows)
    _emit(text, args.out)
    return EXIT_OK


def cmd_banksim(args):
    perm = parse_perm(args.desc)
    layout = BankLayout(args.W, args.M, args.mode)
    if layout.k != perm.k:
        raise UsageError(f"W*M={layout.k} must equal k={perm.k}")
    try:
        sched = schedule_pruned(perm, args.beta, layout, filler=args.filler)
    except ContentionError as exc:
        j, t, v = exc.witness
        print(f"contention: j={j} t={t} v={v} bank={exc.bank}", file=sys.stderr)
        return EXIT_VERIFY
    _emit(CSV_HEADER + "\n" + sched.to_csv(), args.out)
    print(json.dumps(sched.summary(), sort_keys=True), file=sys.stderr)
    return EXIT_OK


COMMANDS = {"stats": cmd_stats, "inl": cmd_inl, "prune": cmd_prune, "bench": cmd_bench, "banksim": cmd_banksim}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.cmd](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DescriptorError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticOverflow, OverflowError) as exc:
        print(f"overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, TypeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
