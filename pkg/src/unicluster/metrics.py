"""Chance-adjusted agreement between two hard clusterings: ARI and AMI.

OUTLIER (-1) is scored as one more cluster label; filter it out beforehand
if that is not what you want.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import LengthMismatch


@dataclass(frozen=True)
class ContingencyTable:
    table: np.ndarray  # rows: labels of a, columns: labels of b

    @property
    def n(self) -> int:
        return int(self.table.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.table.sum(axis=0)


def contingency(a, b) -> ContingencyTable:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"assignments differ in length: {a.shape} vs {b.shape}")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max(initial=-1) + 1, ib.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return ContingencyTable(table)


def _comb2(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x * (x - 1) / 2.0


def _same_partition(t: ContingencyTable) -> bool:
    # identical up to relabeling iff every row and column has one nonzero cell
    nz = t.table > 0
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))


def ari(a, b) -> float:
    """Adjusted Rand index (Hubert and Arabie).

    When the maximum index equals its expectation (for instance both sides
    all-singletons, or both a single cluster) the score is 1 for equal
    partitions and 0 otherwise.
    """
    t = contingency(a, b)
    if t.n < 2:
        raise ValueError("need at least two points")
    index = _comb2(t.table).sum()
    sa = _comb2(t.row_sums).sum()
    sb = _comb2(t.col_sums).sum()
    expected = sa * sb / _comb2(t.n)
    max_index = 0.5 * (sa + sb)
    if max_index == expected:
        return 1.0 if _same_partition(t) else 0.0
    return float((index - expected) / (max_index - expected))


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return -math.fsum(p * np.log(p))


def mutual_information(t: ContingencyTable) -> float:
    n = t.n
    nz = t.table > 0
    nij = t.table[nz].astype(float)
    outer = np.outer(t.row_sums, t.col_sums)[nz].astype(float)
    # fsum is correctly rounded, hence independent of summation order (exact symmetry)
    return math.fsum(nij / n * np.log(n * nij / outer))


def expected_mutual_information(t: ContingencyTable) -> float:
    """E[MI] under the hypergeometric permutation model, summed exactly in log-space."""
    n = t.n
    a = t.row_sums.astype(int)
    b = t.col_sums.astype(int)
    lg_n = gammaln(n + 1)
    terms: list[np.ndarray] = []
    for ai in a:
        for bj in b:
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            if lo > hi:
                continue
            nij = np.arange(lo, hi + 1, dtype=float)
            # a/b terms are added in pairs so swapping the two clusterings is bit-exact
            log_p = (
                (gammaln(ai + 1) + gammaln(bj + 1))
                + (gammaln(n - ai + 1) + gammaln(n - bj + 1))
                - lg_n
                - gammaln(nij + 1)
                - (gammaln(ai - nij + 1) + gammaln(bj - nij + 1))
                - gammaln(n - ai - bj + nij + 1)
            )
            term = nij / n * np.log(n * nij / (ai * bj))
            terms.append(term * np.exp(log_p))
    return math.fsum(np.concatenate(terms)) if terms else 0.0


def ami(a, b) -> float:
    """Adjusted mutual information (Vinh, Epps and Bailey), max-entropy normalizer."""
    t = contingency(a, b)
    if t.n < 2:
        raise ValueError("need at least two points")
    n = t.n
    h = max(_entropy(t.row_sums, n), _entropy(t.col_sums, n))
    mi = mutual_information(t)
    emi = expected_mutual_information(t)
    denom = h - emi
    if abs(denom) <= 1e-12 * max(h, 1.0):
        return 1.0 if _same_partition(t) else 0.0
    return float((mi - emi) / denom)
