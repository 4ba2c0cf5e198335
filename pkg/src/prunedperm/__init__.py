"""Exact counting, gap solving and scheduling for pruned power-of-two permutations."""

from ._ops import OpCounter, counting
from ._validation import ArithmeticOverflow, InexactDivision
from .banking import (BankLayout, ContentionError, GapTable, Schedule, bank_of, contention_check,
                      gap_table, random_cf_perm, schedule_pruned)
from .estimator import PrunedInterleaver
from .inliers import (BruteIndex, inl, inl_block2d, inl_brp, inl_brp_batch, inl_brp_detail, inl_brute,
                      inl_circular, inl_mstream, sinl_brp, sinl_brute)
from .perms import (LCS, QPP, BitReversal, Block2D, Circular, DescriptorError, Flip, MStream, Permutation,
                    Table, describe, eval_brp, parse_perm)
from .pruning import (GapTrace, convergence_check, gap, gap_bounds, minimal_inliers, ppbri,
                      pruned_spread, spbri, spbri_fast, spread_lower_bound)
from .stats import (brp_report, descent_stats, enum_report, excedance_stats, fixed_point_stats,
                    inversions, serial_correlation, spread_min)

__all__ = [
    "ArithmeticOverflow",
    "bank_of",
    "BankLayout",
    "BitReversal",
    "Block2D",
    "brp_report",
    "BruteIndex",
    "Circular",
    "contention_check",
    "ContentionError",
    "convergence_check",
    "counting",
    "descent_stats",
    "describe",
    "DescriptorError",
    "enum_report",
    "eval_brp",
    "excedance_stats",
    "fixed_point_stats",
    "Flip",
    "gap",
    "gap_bounds",
    "gap_table",
    "GapTable",
    "GapTrace",
    "InexactDivision",
    "inl",
    "inl_block2d",
    "inl_brp",
    "inl_brp_batch",
    "inl_brp_detail",
    "inl_brute",
    "inl_circular",
    "inl_mstream",
    "inversions",
    "LCS",
    "minimal_inliers",
    "MStream",
    "OpCounter",
    "parse_perm",
    "Permutation",
    "ppbri",
    "pruned_spread",
    "PrunedInterleaver",
    "QPP",
    "random_cf_perm",
    "Schedule",
    "schedule_pruned",
    "serial_correlation",
    "sinl_brp",
    "sinl_brute",
    "spbri",
    "spbri_fast",
    "spread_lower_bound",
    "spread_min",
    "Table",
]

__version__ = "0.1.0"
