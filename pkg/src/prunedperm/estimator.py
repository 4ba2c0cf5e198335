"""scikit-learn style wrapper around the pruned interleaver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .perms import BitReversal, Permutation, parse_perm
from .pruning import minimal_inliers, ppbri, spbri_fast


class PrunedInterleaver(TransformerMixin, BaseEstimator):
    """Interleave blocks of arbitrary length with a pruned power-of-two permutation.

    Parameters
    ----------
    mother : str or Permutation, default="brp"
        ``"brp"`` picks the bit reversal of the smallest power of two that
        holds the block; anything else is a descriptor or a permutation.
    p : int, default=1
        Number of windows filled independently.
    verify : bool, default=False
        Compare the windowed result with the serial walk during ``fit``.

    Attributes
    ----------
    addresses_ : ndarray of shape (beta,)
        Output position of every input row.
    k_ : int
        Mother length.
    gaps_ : list of int
        Window seeds found by the gap solver.
    """

    def __init__(self, mother="brp", p=1, verify=False):
        self.mother = mother
        self.p = p
        self.verify = verify

    def _mother(self, beta):
        if isinstance(self.mother, Permutation):
            return self.mother
        if self.mother == "brp":
            n = max(0, (beta - 1).bit_length())
            return BitReversal(n)
        return parse_perm(self.mother)

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=False, allow_nd=True, dtype=None)
        beta = X.shape[0]
        perm = self._mother(beta)
        if perm.k < beta:
            raise ValueError(f"mother length {perm.k} is shorter than the block ({beta})")
        res = ppbri(perm, min(self.p, beta), beta, fast=True, details=True)
        if self.verify:
            ref = spbri_fast(perm, 0, beta - 1, beta, 0)[0]
            if not np.array_equal(ref, res.addresses):
                raise RuntimeError("windowed interleaving disagrees with the serial walk")
        self.addresses_ = res.addresses
        self.gaps_ = list(res.seeds)
        self.k_ = perm.k
        self.perm_ = perm
        self.n_features_in_ = 1 if X.ndim == 1 else X.shape[1]
        return self

    def _check_len(self, X):
        if X.shape[0] != self.addresses_.shape[0]:
            raise ValueError(f"expected {self.addresses_.shape[0]} rows, got {X.shape[0]}")

    def transform(self, X):
        """Row ``x`` of the input lands on row ``addresses_[x]``."""
        check_is_fitted(self, "addresses_")
        X = check_array(X, ensure_2d=False, allow_nd=True, dtype=None)
        self._check_len(X)
        out = np.empty_like(X)
        out[self.addresses_] = X
        return out

    def inverse_transform(self, X):
        check_is_fitted(self, "addresses_")
        X = check_array(X, ensure_2d=False, allow_nd=True, dtype=None)
        self._check_len(X)
        return X[self.addresses_]

    def gap(self, x):
        """Pruning gap of input row ``x`` via the fixed-point solver."""
        check_is_fitted(self, "addresses_")
        return minimal_inliers(self.perm_, x, self.addresses_.shape[0]).finalGap

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.one_d_array = True
        tags.input_tags.two_d_array = True
        tags.requires_fit = True
        return tags
