import pytest

from prunedperm.bench import CSV_HEADER, FAMILIES, BenchConfig, bench_point, family_perm, rows_to_csv, run_bench
from prunedperm.perms import validate_perm


@pytest.mark.parametrize("family", FAMILIES)
def test_families_are_bijections(family):
    p = family_perm(family, 10, seed=1)
    assert p.k == 1 << 10 and validate_perm(p)


@pytest.mark.parametrize("family", FAMILIES)
def test_bench_point_verified(family):
    row = bench_point(family, 10, 8)
    assert row["verified"] is True
    assert row["parallel_ops"] <= row["parallel_total_ops"]


def test_deterministic_csv():
    cfg = BenchConfig(families=["brev1D", "lcs1D"], sizes=[9, 10], parallelism=[2, 8])
    a, b = rows_to_csv(run_bench(cfg)), rows_to_csv(run_bench(cfg))
    assert a == b and a.startswith(CSV_HEADER + "\n")


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(families=["nope"])
    with pytest.raises(ValueError):
        BenchConfig(parallelism=[0])
    with pytest.raises(ValueError):
        BenchConfig(beta_frac=0)


def test_unknown_family():
    with pytest.raises(ValueError):
        family_perm("brev3D", 10)
