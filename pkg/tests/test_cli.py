import json

import numpy as np
import pytest

from prunedperm.cli import main
from prunedperm.inliers import inl_brute
from prunedperm.perms import BitReversal


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_inl(capsys):
    code, out, _ = run(capsys, "inl", "brp:n=8", "--alpha", "100", "--beta", "77")
    assert code == 0 and int(out) == inl_brute(BitReversal(8), 100, 77)


def test_prune_gap_only(capsys):
    code, out, _ = run(capsys, "prune", "brp:n=10", "--alpha", "300", "--beta", "700", "--gap-only")
    doc = json.loads(out)
    t = BitReversal(10).table()
    assert code == 0 and doc["finalGap"] == int(np.flatnonzero(t < 700)[299]) + 1 - 300


def test_prune_addresses_bin(tmp_path, capsys):
    f = tmp_path / "a.bin"
    code, _, _ = run(capsys, "prune", "brp:n=6", "--beta", "45", "--p", "4", "--verify", "--out", str(f))
    t = BitReversal(6).table()
    assert code == 0 and np.fromfile(f, "<u4").tolist() == t[t < 45].tolist()


def test_prune_csv_stdout(capsys):
    code, out, err = run(capsys, "prune", "brp:n=4", "--beta", "12", "--verify")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "# prunedperm-csv v1" and len(lines) == 2 + 12
    assert json.loads(err)["verify"] == "OK"


def test_stats_side_by_side(capsys):
    code, out, _ = run(capsys, "stats", "brp:n=6", "--format", "csv")
    rows = [x.split(",") for x in out.splitlines()[2:]]
    assert code == 0 and rows and all(r[2] == r[3] for r in rows)
    code, out, _ = run(capsys, "stats", "brp:n=6")
    assert json.loads(out)["agree"] is True


def test_banksim(tmp_path, capsys):
    f = tmp_path / "trace.csv"
    code, _, err = run(capsys, "banksim", "brp:n=5", "--beta", "22", "--W", "4", "--M", "8", "--out", str(f))
    assert code == 0
    assert f.read_text().startswith("# prunedperm-csv v1\nstep,bank,action,linear,permuted")
    assert json.loads(err)["stalls"] == 10


def test_banksim_contention_exit(capsys):
    code, _, err = run(capsys, "banksim", "brp:n=5", "--beta", "22", "--W", "4", "--M", "8", "--mode", "msb")
    assert code == 2 and "contention" in err


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--family", "brev1D", "--sizes", "8-9", "--p", "4")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "# prunedperm-csv v1" and len(lines) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["inl", "brp:n=x", "--alpha", "1", "--beta", "1"],
        ["prune", "brp:n=5", "--beta", "22", "--p", "0"],
        ["prune", "brp:n=30", "--beta", "22"],
        ["nosuch"],
        ["banksim", "brp:n=5", "--beta", "22", "--W", "4", "--M", "4"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_overflow_exit(capsys):
    code, _, err = run(capsys, "inl", "brp:n=63", "--alpha", str(2**63 - 1), "--beta", str(2**63 - 15))
    assert code == 3 and "overflow" in err
